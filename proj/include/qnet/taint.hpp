#pragma once

#include "qnet/network.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace qnet {

/// Faulty input streams, plus optional colour overrides that model a bad
/// stream numerically.
struct FaultMask {
  std::set<EdgeId> faulty;
  std::map<EdgeId, Colour> overrides;

  bool empty() const { return faulty.empty(); }
};

/// The protected subnetwork N_L. Interactions are tracked by id so the
/// region survives rewrites that renumber the edges around it.
struct RegionSpec {
  std::set<EdgeId> memberEdges;
  std::set<InteractionId> memberInteractions;
};

struct TimelineStep {
  int step = 0;
  FaultMask mask;
};

using Timeline = std::vector<TimelineStep>;

/// Member edges that exist plus every edge incident to a member interaction.
inline std::set<EdgeId> regionEdges(const Network& net, const RegionSpec& region) {
  std::set<EdgeId> out;
  for (const auto& e : region.memberEdges)
    if (net.edges.count(e)) out.insert(e);
  for (const auto& [id, e] : net.edges)
    if (region.memberInteractions.count(e.tail) || region.memberInteractions.count(e.head)) out.insert(id);
  return out;
}

/// Edges whose colour depends on a faulty input.
inline std::set<EdgeId> taintPropagate(const Network& net, const FaultMask& mask) {
  std::set<EdgeId> taint;
  if (mask.faulty.empty()) return taint;
  auto order = topologicalOrder(net);
  if (!order) throw Error(ErrorKind::InvalidNetwork, "cyclic dependency");
  for (const auto& e : *order) {
    const auto& tail = net.edge(e).tail;
    if (net.isEndpoint(tail)) {
      if (mask.faulty.count(e)) taint.insert(e);
      continue;
    }
    const auto& v = net.interactions.at(tail);
    const bool agent = taint.count(v.agentIn) != 0;
    if (v.agentOut == e) {
      if (agent) taint.insert(e);
      continue;
    }
    for (const auto& p : v.patients)
      if (p.out == e && (agent || taint.count(p.in))) taint.insert(e);
  }
  return taint;
}

inline int taintCount(const Network& net, const FaultMask& mask, const RegionSpec& region) {
  const auto taint = taintPropagate(net, mask);
  int n = 0;
  for (const auto& e : regionEdges(net, region)) n += static_cast<int>(taint.count(e));
  return n;
}

/// Inputs with the mask's overrides substituted.
inline InputMap applyOverrides(InputMap inputs, const FaultMask& mask) {
  for (const auto& [e, c] : mask.overrides) inputs[e] = c;
  return inputs;
}

}  // namespace qnet
