#pragma once

// Small reference networks.
//
// Scheme A fuses stream 0 with stream 1 first, then updates both results
// with stream 2. Scheme B updates streams 0 and 1 with stream 2 first and
// fuses the results. The two are related by one R3 move.
//
// The fault harness has two chains p and q meeting in a protected pair of
// crossings L1 (q acts on p) and L2 (p acts on q). Streams 0, 1, 2 act on
// both chains, in that order, before they reach L1.

#include "qnet/network.hpp"
#include "qnet/taint.hpp"

#include <string>
#include <vector>

namespace qnet::fixtures {

namespace detail {

inline void addEdge(Network& net, const EdgeId& id, const NodeId& tail, const NodeId& head) {
  net.edges[id] = Edge{tail, head};
}

inline Network skeleton(QuandloidKind kind, Eigen::Index dim, const std::vector<std::string>& inputs,
                        const std::vector<std::string>& outputs) {
  Network net;
  net.kind = kind;
  net.dim = dim;
  for (const auto& id : inputs) net.endpoints[id] = EndpointRole::Initial;
  for (const auto& id : outputs) net.endpoints[id] = EndpointRole::Terminal;
  return net;
}

}  // namespace detail

inline Network schemeA(double s = 0.5, double t = 0.5, QuandloidKind kind = QuandloidKind::CovarianceIntersection,
                       Eigen::Index dim = 1) {
  using detail::addEdge;
  Network net = detail::skeleton(kind, dim, {"in0", "in1", "in2"}, {"out0", "out1", "out2"});
  addEdge(net, "0", "in0", "v1");
  addEdge(net, "1", "in1", "v1");
  addEdge(net, "2", "in2", "v2");
  addEdge(net, "a", "v1", "v2");
  addEdge(net, "1'", "v1", "v2");
  addEdge(net, "b", "v2", "out0");
  addEdge(net, "c", "v2", "out1");
  addEdge(net, "2'", "v2", "out2");
  net.interactions["v1"] = Interaction{"1", "1'", {PatientPair{"0", "a"}}, OpParam(s)};
  net.interactions["v2"] = Interaction{"2", "2'", {PatientPair{"a", "b"}, PatientPair{"1'", "c"}}, OpParam(t)};
  return net;
}

inline Network schemeB(double s = 0.5, double t = 0.5, QuandloidKind kind = QuandloidKind::CovarianceIntersection,
                       Eigen::Index dim = 1) {
  using detail::addEdge;
  Network net = detail::skeleton(kind, dim, {"in0", "in1", "in2"}, {"out0", "out1", "out2"});
  addEdge(net, "0", "in0", "w1");
  addEdge(net, "1", "in1", "w1");
  addEdge(net, "2", "in2", "w1");
  addEdge(net, "abar", "w1", "w2");
  addEdge(net, "c", "w1", "w2");
  addEdge(net, "bbar", "w2", "out0");
  addEdge(net, "c'", "w2", "out1");
  addEdge(net, "2'", "w1", "out2");
  net.interactions["w1"] = Interaction{"2", "2'", {PatientPair{"0", "abar"}, PatientPair{"1", "c"}}, OpParam(t)};
  net.interactions["w2"] = Interaction{"c", "c'", {PatientPair{"abar", "bbar"}}, OpParam(s)};
  return net;
}

/// Scalar CI inputs used in the worked propagation example.
inline InputMap schemeInputs() {
  auto ci = [](double m, double c) { return Colour{GaussianEstimate{Vector::Constant(1, m), Matrix::Constant(1, 1, c)}}; };
  return {{"0", ci(0.0, 1.0)}, {"1", ci(2.0, 1.0)}, {"2", ci(1.0, 2.0)}};
}

inline Network harness(QuandloidKind kind = QuandloidKind::CovarianceIntersection, Eigen::Index dim = 1) {
  using detail::addEdge;
  Network net = detail::skeleton(kind, dim, {"inp", "inq", "in0", "in1", "in2"}, {"outp", "outq", "out0", "out1", "out2"});
  addEdge(net, "p", "inp", "g0");
  addEdge(net, "q", "inq", "g0");
  const double weights[] = {0.3, 0.4, 0.5};
  std::string p = "p", q = "q";
  for (int k = 0; k < 3; ++k) {
    const std::string g = "g" + std::to_string(k), id = std::to_string(k);
    const std::string next = k < 2 ? "g" + std::to_string(k + 1) : "L1";
    const std::string pn = "p" + std::to_string(k + 1), qn = "q" + std::to_string(k + 1);
    addEdge(net, id, "in" + id, g);
    addEdge(net, id + "'", g, "out" + id);
    addEdge(net, pn, g, next);
    addEdge(net, qn, g, next);
    net.interactions[g] = Interaction{id, id + "'", {PatientPair{p, pn}, PatientPair{q, qn}}, OpParam(weights[k])};
    p = pn;
    q = qn;
  }
  // p3, q3 enter L1; q acts on p there, then p acts on q at L2
  addEdge(net, "p4", "L1", "L2");
  addEdge(net, "q4", "L1", "L2");
  addEdge(net, "p5", "L2", "outp");
  addEdge(net, "q5", "L2", "outq");
  net.interactions["L1"] = Interaction{"q3", "q4", {PatientPair{"p3", "p4"}}, OpParam(0.6)};
  net.interactions["L2"] = Interaction{"p4", "p5", {PatientPair{"q4", "q5"}}, OpParam(0.7)};
  return net;
}

inline RegionSpec harnessRegion() { return RegionSpec{{}, {"L1", "L2"}}; }

/// Fault-code digit i names stream i.
inline std::vector<EdgeId> harnessFaultOrder() { return {"0", "1", "2"}; }

inline InputMap harnessInputs() {
  auto ci = [](double m, double c) { return Colour{GaussianEstimate{Vector::Constant(1, m), Matrix::Constant(1, 1, c)}}; };
  return {{"p", ci(0.0, 1.0)}, {"q", ci(1.0, 2.0)}, {"0", ci(2.0, 1.0)}, {"1", ci(-1.0, 1.5)}, {"2", ci(0.5, 3.0)}};
}

}  // namespace qnet::fixtures
