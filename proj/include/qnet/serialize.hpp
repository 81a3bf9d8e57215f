#pragma once

// Network files (JSON, version 1) and colour literals.
//
//   {"version": 1,
//    "quandloid": {"name": "ci", "dim": 1},
//    "endpoints": [{"id": "in0", "role": "initial"}, ...],
//    "edges": [{"id": "0", "tail": "in0", "head": "v1"}, ...],
//    "interactions": [{"id": "v1", "s": 0.5, "agent": ["1", "1'"],
//                      "patients": [{"in": "0", "out": "a", "mode": "update"}]}],
//    "inputs": {"0": {"mean": [0], "cov": [[1]]}},
//    "region": {"edges": [], "interactions": []},
//    "faultOrder": ["0", "1", "2"],
//    "timeline": [{"step": 0, "faulty": [], "overrides": {}}]}

#include "qnet/network.hpp"
#include "qnet/taint.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qnet {

using Json = nlohmann::ordered_json;

struct NetworkFile {
  Network net;
  InputMap inputs;
  std::optional<RegionSpec> region;
  std::vector<EdgeId> faultOrder;
  std::optional<Timeline> timeline;
};

namespace detail {

inline Json vectorJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json matrixJson(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Vector vectorFrom(const Json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, what + ": expected an array of length " + std::to_string(n));
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

inline Matrix matrixFrom(const Json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, what + ": expected " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) = vectorFrom(j.at(static_cast<std::size_t>(i)), n, what).transpose();
  return m;
}

template <class F>
auto parsing(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace detail

inline Json colourToJson(const Colour& c) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GaussianEstimate>) {
          return Json{{"mean", detail::vectorJson(x.mean)}, {"cov", detail::matrixJson(x.cov)}};
        } else if constexpr (std::is_same_v<T, UnnormalizedGaussian>) {
          return Json{{"mean", detail::vectorJson(x.mean)}, {"cov", detail::matrixJson(x.cov)}, {"logScale", x.logScale}};
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return Json{{"info", detail::matrixJson(x.mat)}};
        } else if constexpr (std::is_same_v<T, EntropyVal>) {
          return Json{{"bits", x.bits}};
        } else if constexpr (std::is_same_v<T, Vec>) {
          return Json{{"v", detail::vectorJson(x.v)}};
        } else {
          return Json{{"value", x.value}};
        }
      },
      c);
}

inline Colour colourFromJson(const Json& j, QuandloidKind kind, Eigen::Index dim) {
  return detail::parsing([&]() -> Colour {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "colour literal must be an object");
    Colour c;
    switch (kind) {
      case QuandloidKind::CovarianceIntersection:
        c = GaussianEstimate{detail::vectorFrom(j.at("mean"), dim, "mean"), detail::matrixFrom(j.at("cov"), dim, "cov")};
        break;
      case QuandloidKind::LogLinearGaussian:
        c = UnnormalizedGaussian{detail::vectorFrom(j.at("mean"), dim, "mean"), detail::matrixFrom(j.at("cov"), dim, "cov"),
                                 j.value("logScale", 0.0)};
        break;
      case QuandloidKind::Fisher:
        c = InfoMatrix{detail::matrixFrom(j.at("info"), dim, "info")};
        break;
      case QuandloidKind::Entropy:
        c = EntropyVal{j.at("bits").get<double>()};
        break;
      case QuandloidKind::Vector:
        c = Vec{detail::vectorFrom(j.at("v"), dim, "v")};
        break;
      case QuandloidKind::LogLinearScalar:
        c = Density{j.at("value").get<double>()};
        break;
    }
    checkColour(c);
    return c;
  });
}

inline Json maskToJson(const FaultMask& m) {
  Json overrides = Json::object();
  for (const auto& [e, c] : m.overrides) overrides[e] = colourToJson(c);
  return Json{{"faulty", m.faulty}, {"overrides", overrides}};
}

inline Json networkToJson(const NetworkFile& f) {
  const Network& net = f.net;
  Json j;
  j["version"] = 1;
  j["quandloid"] = Json{{"name", std::string(to_string(net.kind))}, {"dim", net.dim}};
  Json eps = Json::array();
  for (const auto& [id, role] : net.endpoints)
    eps.push_back(Json{{"id", id}, {"role", role == EndpointRole::Initial ? "initial" : "terminal"}});
  j["endpoints"] = eps;
  Json edges = Json::array();
  for (const auto& [id, e] : net.edges) edges.push_back(Json{{"id", id}, {"tail", e.tail}, {"head", e.head}});
  j["edges"] = edges;
  Json vs = Json::array();
  for (const auto& [id, v] : net.interactions) {
    Json ps = Json::array();
    for (const auto& p : v.patients) ps.push_back(Json{{"in", p.in}, {"out", p.out}, {"mode", std::string(to_string(p.mode))}});
    vs.push_back(Json{{"id", id}, {"s", v.op.s()}, {"agent", Json::array({v.agentIn, v.agentOut})}, {"patients", ps}});
  }
  j["interactions"] = vs;
  Json inputs = Json::object();
  for (const auto& [e, c] : f.inputs) inputs[e] = colourToJson(c);
  j["inputs"] = inputs;
  if (f.region) j["region"] = Json{{"edges", f.region->memberEdges}, {"interactions", f.region->memberInteractions}};
  if (!f.faultOrder.empty()) j["faultOrder"] = f.faultOrder;
  if (f.timeline) {
    Json tl = Json::array();
    for (const auto& s : *f.timeline) {
      Json step = maskToJson(s.mask);
      step["step"] = s.step;
      tl.push_back(step);
    }
    j["timeline"] = tl;
  }
  return j;
}

inline FaultMask maskFromJson(const Json& j, const Network& net) {
  FaultMask m;
  for (const auto& e : j.value("faulty", Json::array())) m.faulty.insert(e.get<std::string>());
  const Json overrides = j.value("overrides", Json::object());
  for (const auto& [e, c] : overrides.items()) m.overrides.emplace(e, colourFromJson(c, net.kind, net.dim));
  return m;
}

inline NetworkFile networkFromJson(const Json& j) {
  return detail::parsing([&] {
    NetworkFile f;
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "network file must be a JSON object");
    const int version = j.at("version").get<int>();
    if (version != 1) throw Error(ErrorKind::ParseError, "unsupported version " + std::to_string(version));
    Network& net = f.net;
    net.kind = kindFromString(j.at("quandloid").at("name").get<std::string>());
    net.dim = j.at("quandloid").value("dim", 1);
    if (net.dim < 1) throw Error(ErrorKind::ParseError, "dimension must be positive");
    for (const auto& ep : j.at("endpoints")) {
      const auto role = ep.at("role").get<std::string>();
      if (role != "initial" && role != "terminal") throw Error(ErrorKind::ParseError, "bad endpoint role '" + role + "'");
      net.endpoints[ep.at("id").get<std::string>()] = role == "initial" ? EndpointRole::Initial : EndpointRole::Terminal;
    }
    for (const auto& e : j.at("edges")) net.edges[e.at("id").get<std::string>()] = Edge{e.at("tail"), e.at("head")};
    for (const auto& v : j.at("interactions")) {
      Interaction in;
      const auto& agent = v.at("agent");
      if (!agent.is_array() || agent.size() != 2) throw Error(ErrorKind::ParseError, "agent must be [in, out]");
      in.agentIn = agent[0].get<std::string>();
      in.agentOut = agent[1].get<std::string>();
      in.op = OpParam(v.at("s").get<double>());
      for (const auto& p : v.at("patients")) {
        const auto mode = p.value("mode", std::string("update"));
        if (mode != "update" && mode != "discount") throw Error(ErrorKind::ParseError, "bad mode '" + mode + "'");
        in.patients.push_back(PatientPair{p.at("in"), p.at("out"), mode == "update" ? PatientMode::Update : PatientMode::Discount});
      }
      net.interactions[v.at("id").get<std::string>()] = std::move(in);
    }
    const Json inputs = j.value("inputs", Json::object());
    for (const auto& [e, c] : inputs.items()) f.inputs.emplace(e, colourFromJson(c, net.kind, net.dim));
    if (j.contains("region")) {
      RegionSpec r;
      const auto& rj = j.at("region");
      for (const auto& e : rj.value("edges", Json::array())) r.memberEdges.insert(e.get<std::string>());
      for (const auto& v : rj.value("interactions", Json::array())) r.memberInteractions.insert(v.get<std::string>());
      f.region = std::move(r);
    }
    for (const auto& e : j.value("faultOrder", Json::array())) f.faultOrder.push_back(e.get<std::string>());
    if (j.contains("timeline")) {
      Timeline tl;
      for (const auto& s : j.at("timeline")) tl.push_back(TimelineStep{s.value("step", static_cast<int>(tl.size())), maskFromJson(s, net)});
      f.timeline = std::move(tl);
    }
    return f;
  });
}

inline NetworkFile parseNetworkFile(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return networkFromJson(j);
}

inline NetworkFile loadNetworkFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseNetworkFile(ss.str());
}

inline Json colouringToJson(const Colouring& col) {
  Json edges = Json::object();
  for (const auto& [e, c] : col.edgeColour) edges[e] = colourToJson(c);
  return edges;
}

/// Terminal colours keyed by terminal endpoint id.
inline Json terminalsToJson(const Network& net, const Colouring& col) {
  Json out = Json::object();
  for (const auto& [ep, c] : terminalColoursByEndpoint(net, col)) out[ep] = colourToJson(c);
  return out;
}

/// Timeline from comma-separated fault codes such as "000,0X0"; digit i
/// refers to faultOrder[i]. "fig4" expands to the six codes of the
/// reconfiguration demo.
inline Timeline parseFaultCodes(const std::string& spec, const std::vector<EdgeId>& faultOrder) {
  std::string codes = spec == "fig4" ? "000,00X,0X0,X00,X0X,0XX" : spec;
  Timeline tl;
  std::stringstream ss(codes);
  std::string code;
  while (std::getline(ss, code, ',')) {
    if (code.size() != faultOrder.size()) {
      throw Error(ErrorKind::ParseError, "fault code '" + code + "' needs " + std::to_string(faultOrder.size()) + " digits");
    }
    TimelineStep step;
    step.step = static_cast<int>(tl.size());
    for (std::size_t i = 0; i < code.size(); ++i) {
      if (code[i] == 'X' || code[i] == 'x') {
        step.mask.faulty.insert(faultOrder[i]);
      } else if (code[i] != '0') {
        throw Error(ErrorKind::ParseError, "fault code '" + code + "' may only contain 0 and X");
      }
    }
    tl.push_back(std::move(step));
  }
  if (tl.empty()) throw Error(ErrorKind::ParseError, "empty timeline");
  return tl;
}

inline std::string faultCode(const FaultMask& mask, const std::vector<EdgeId>& faultOrder) {
  std::string code;
  for (const auto& e : faultOrder) code += mask.faulty.count(e) ? 'X' : '0';
  return code;
}

}  // namespace qnet
