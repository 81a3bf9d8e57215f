#pragma once

#include "qnet/network.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qnet {

namespace detail {

inline std::string formatWeight(double s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", s);
  return buf;
}

/// Serializes the network after numbering edges and interactions by a
/// breadth-first traversal seeded with the initial endpoints in `order`.
/// With `anchored`, endpoint ids are part of the output.
inline std::string traversalKey(const Network& net, const std::vector<NodeId>& order, bool anchored) {
  std::map<EdgeId, int> edgeNum;
  std::map<InteractionId, int> nodeNum;
  std::vector<InteractionId> nodes;
  std::deque<EdgeId> queue;
  auto visitEdge = [&](const EdgeId& e) {
    if (edgeNum.emplace(e, static_cast<int>(edgeNum.size())).second) queue.push_back(e);
  };
  for (const auto& ep : order)
    if (auto e = net.endpointEdge(ep)) visitEdge(*e);
  while (!queue.empty()) {
    const EdgeId e = queue.front();
    queue.pop_front();
    const auto& edge = net.edge(e);
    for (const auto* n : {&edge.tail, &edge.head}) {
      auto it = net.interactions.find(*n);
      if (it == net.interactions.end() || nodeNum.count(*n)) continue;
      nodeNum.emplace(*n, static_cast<int>(nodes.size()));
      nodes.push_back(*n);
      const auto& v = it->second;
      visitEdge(v.agentIn);
      visitEdge(v.agentOut);
      for (const auto& p : v.patients) {
        visitEdge(p.in);
        visitEdge(p.out);
      }
    }
  }
  // unreachable leftovers (only in malformed networks)
  for (const auto& [id, e] : net.edges) visitEdge(id);

  std::string key = std::string(to_string(net.kind)) + "/" + std::to_string(net.dim) + "|I:";
  for (const auto& ep : order) {
    if (anchored) key += ep + "=";
    auto e = net.endpointEdge(ep);
    key += (e ? std::to_string(edgeNum.at(*e)) : std::string("?")) + ",";
  }
  key += "|V:";
  for (const auto& vid : nodes) {
    const auto& v = net.interactions.at(vid);
    key += "[" + formatWeight(v.op.s()) + ";A" + std::to_string(edgeNum.at(v.agentIn)) + ">" +
           std::to_string(edgeNum.at(v.agentOut));
    for (const auto& p : v.patients) {
      key += p.mode == PatientMode::Update ? ";U" : ";D";
      key += std::to_string(edgeNum.at(p.in)) + ">" + std::to_string(edgeNum.at(p.out));
    }
    key += "]";
  }
  key += "|T:";
  std::vector<std::pair<int, NodeId>> terms;
  for (const auto& [id, role] : net.endpoints) {
    if (role != EndpointRole::Terminal) continue;
    auto e = net.endpointEdge(id);
    terms.emplace_back(e ? edgeNum.at(*e) : -1, id);
  }
  std::sort(terms.begin(), terms.end());
  for (const auto& [n, id] : terms) key += (anchored ? id + "=" : std::string()) + std::to_string(n) + ",";
  return key;
}

/// Relabel-invariant description of the process starting at an initial endpoint.
inline std::string endpointSignature(const Network& net, const NodeId& ep) {
  std::string sig;
  auto cur = net.endpointEdge(ep);
  std::set<EdgeId> seen;
  while (cur && seen.insert(*cur).second) {
    const auto& head = net.edge(*cur).head;
    auto it = net.interactions.find(head);
    if (it == net.interactions.end()) break;
    const auto& v = it->second;
    if (v.agentIn == *cur) {
      sig += "A";
    } else {
      for (const auto& p : v.patients)
        if (p.in == *cur) sig += p.mode == PatientMode::Update ? "U" : "D";
    }
    sig += formatWeight(v.op.s()) + "/" + std::to_string(v.patients.size()) + ";";
    cur = successor(net, *cur);
  }
  return sig;
}

}  // namespace detail

/// Key invariant under relabelling of every node and edge. Equal keys mean
/// isomorphic diagrams (same weights, modes and patient order).
inline std::string canonicalKey(const Network& net) {
  if (net.edges.empty() && net.interactions.empty() && net.endpoints.empty()) return "qnet:empty";
  std::vector<std::pair<std::string, NodeId>> sigs;
  for (const auto& [id, role] : net.endpoints)
    if (role == EndpointRole::Initial) sigs.emplace_back(detail::endpointSignature(net, id), id);
  std::sort(sigs.begin(), sigs.end());

  // groups of endpoints whose signatures tie
  std::vector<std::vector<NodeId>> groups;
  std::size_t permutations = 1;
  for (std::size_t i = 0; i < sigs.size();) {
    std::size_t j = i;
    std::vector<NodeId> g;
    while (j < sigs.size() && sigs[j].first == sigs[i].first) g.push_back(sigs[j++].second);
    for (std::size_t k = 2; k <= g.size() && permutations <= 5040; ++k) permutations *= k;
    groups.push_back(std::move(g));
    i = j;
  }
  auto flatten = [&groups] {
    std::vector<NodeId> order;
    for (const auto& g : groups) order.insert(order.end(), g.begin(), g.end());
    return order;
  };
  std::string best = detail::traversalKey(net, flatten(), false);
  if (permutations <= 1 || permutations > 5040) return best;

  // odometer over the permutations of every tie group
  std::function<void(std::size_t)> walk = [&](std::size_t gi) {
    if (gi == groups.size()) {
      best = std::min(best, detail::traversalKey(net, flatten(), false));
      return;
    }
    auto& g = groups[gi];
    std::sort(g.begin(), g.end());
    do {
      walk(gi + 1);
    } while (std::next_permutation(g.begin(), g.end()));
  };
  walk(0);
  return best;
}

/// Key invariant under relabelling of interactions and edges, with endpoints
/// fixed by id. Rewrites never touch endpoints, so this separates members of
/// an equivalence class that differ only by which input feeds which strand.
inline std::string anchoredKey(const Network& net) {
  std::vector<NodeId> order;
  for (const auto& [id, role] : net.endpoints)
    if (role == EndpointRole::Initial) order.push_back(id);
  return detail::traversalKey(net, order, true);
}

}  // namespace qnet
