#pragma once

// Information fusion networks: directed graphs whose nodes are endpoints
// (degree 1) or interactions. An interaction has one agent, stored as an
// (in, out) edge pair carrying the same colour, and one or more patient
// pairs, each either updated (out = in ▷ agent) or discounted
// (in = out ▷ agent, computed as out = in ◁ agent).

#include "qnet/quandloid.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace qnet {

using EdgeId = std::string;
using NodeId = std::string;
using InteractionId = std::string;

enum class EndpointRole { Initial, Terminal };

struct Edge {
  NodeId tail;
  NodeId head;
};

struct PatientPair {
  EdgeId in;
  EdgeId out;
  PatientMode mode = PatientMode::Update;
};

struct Interaction {
  EdgeId agentIn;
  EdgeId agentOut;
  std::vector<PatientPair> patients;
  OpParam op;
};

struct Network {
  QuandloidKind kind = QuandloidKind::CovarianceIntersection;
  Eigen::Index dim = 1;
  std::map<EdgeId, Edge> edges;
  std::map<NodeId, EndpointRole> endpoints;
  std::map<InteractionId, Interaction> interactions;

  bool isInteraction(const NodeId& n) const { return interactions.count(n) != 0; }
  bool isEndpoint(const NodeId& n) const { return endpoints.count(n) != 0; }

  bool isInitialEdge(const EdgeId& e) const {
    auto it = edges.find(e);
    if (it == edges.end()) return false;
    auto ep = endpoints.find(it->second.tail);
    return ep != endpoints.end() && ep->second == EndpointRole::Initial;
  }

  bool isTerminalEdge(const EdgeId& e) const {
    auto it = edges.find(e);
    if (it == edges.end()) return false;
    auto ep = endpoints.find(it->second.head);
    return ep != endpoints.end() && ep->second == EndpointRole::Terminal;
  }

  std::vector<EdgeId> initialEdges() const {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : edges)
      if (isInitialEdge(id)) out.push_back(id);
    return out;
  }

  std::vector<EdgeId> terminalEdges() const {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : edges)
      if (isTerminalEdge(id)) out.push_back(id);
    return out;
  }

  /// The edge attached to an endpoint, if exactly one.
  std::optional<EdgeId> endpointEdge(const NodeId& endpoint) const {
    std::optional<EdgeId> found;
    for (const auto& [id, e] : edges) {
      if (e.tail == endpoint || e.head == endpoint) {
        if (found) return std::nullopt;
        found = id;
      }
    }
    return found;
  }

  const Interaction& interaction(const InteractionId& id) const {
    auto it = interactions.find(id);
    if (it == interactions.end()) throw Error(ErrorKind::InvalidNetwork, "no interaction '" + id + "'");
    return it->second;
  }

  const Edge& edge(const EdgeId& id) const {
    auto it = edges.find(id);
    if (it == edges.end()) throw Error(ErrorKind::InvalidNetwork, "no edge '" + id + "'");
    return it->second;
  }
};

/// ρ_E and ρ_V.
struct Colouring {
  std::map<EdgeId, Colour> edgeColour;
  std::map<InteractionId, OpParam> interactionOp;

  const Colour& at(const EdgeId& e) const {
    auto it = edgeColour.find(e);
    if (it == edgeColour.end()) throw Error(ErrorKind::MissingInput, "edge '" + e + "' is not coloured");
    return it->second;
  }
};

using InputMap = std::map<EdgeId, Colour>;
using OpMap = std::map<InteractionId, OpParam>;

struct Violation {
  std::string code;
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
  }
};

namespace detail {

/// (edge, edges it is computed from) for every non-initial edge.
inline std::map<EdgeId, std::vector<EdgeId>> dependencies(const Network& net) {
  std::map<EdgeId, std::vector<EdgeId>> deps;
  for (const auto& [id, e] : net.edges) deps[id];
  for (const auto& [vid, v] : net.interactions) {
    deps[v.agentOut].push_back(v.agentIn);
    for (const auto& p : v.patients) {
      deps[p.out].push_back(p.in);
      deps[p.out].push_back(v.agentIn);
    }
  }
  return deps;
}

}  // namespace detail

/// Edges in dependency order (ties by id), or nullopt on a cycle.
inline std::optional<std::vector<EdgeId>> topologicalOrder(const Network& net) {
  const auto deps = detail::dependencies(net);
  std::map<EdgeId, int> pending;
  std::map<EdgeId, std::vector<EdgeId>> users;
  for (const auto& [e, ds] : deps) {
    pending[e] = static_cast<int>(ds.size());
    for (const auto& d : ds) users[d].push_back(e);
  }
  std::set<EdgeId> ready;
  for (const auto& [e, n] : pending)
    if (n == 0) ready.insert(e);
  std::vector<EdgeId> order;
  while (!ready.empty()) {
    EdgeId e = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(e);
    for (const auto& u : users[e])
      if (--pending[u] == 0) ready.insert(u);
  }
  if (order.size() != deps.size()) return std::nullopt;
  return order;
}

inline ValidationReport validate(const Network& net) {
  ValidationReport r;
  auto add = [&r](std::string code, std::string where, std::string msg) {
    r.violations.push_back({std::move(code), std::move(where), std::move(msg)});
  };

  for (const auto& [id, v] : net.interactions)
    if (net.isEndpoint(id)) add("duplicate node", id, "node is both an endpoint and an interaction");

  std::map<NodeId, int> inDeg, outDeg;
  for (const auto& [id, e] : net.edges) {
    for (const auto* n : {&e.tail, &e.head}) {
      if (!net.isEndpoint(*n) && !net.isInteraction(*n)) add("dangling edge", id, "unknown node '" + *n + "'");
    }
    ++outDeg[e.tail];
    ++inDeg[e.head];
  }

  int initial = 0, terminal = 0;
  for (const auto& [id, role] : net.endpoints) {
    const int in = inDeg[id], out = outDeg[id];
    if (in + out != 1) {
      add("endpoint degree", id, "endpoint has degree " + std::to_string(in + out));
      continue;
    }
    if (role == EndpointRole::Initial) {
      ++initial;
      if (out != 1) add("initial not source", id, "initial endpoint must be a source");
    } else {
      ++terminal;
      if (in != 1) add("terminal not sink", id, "terminal endpoint must be a sink");
    }
  }
  if (initial != terminal) {
    add("endpoint count", "", std::to_string(initial) + " initial vs " + std::to_string(terminal) + " terminal endpoints");
  }

  for (const auto& [vid, v] : net.interactions) {
    if (v.patients.empty()) add("no patients", vid, "interaction has no patient pairs");
    if (inDeg[vid] != outDeg[vid]) {
      add("degree mismatch", vid,
          "in-degree " + std::to_string(inDeg[vid]) + " != out-degree " + std::to_string(outDeg[vid]));
    }
    std::set<EdgeId> inSlots, outSlots;
    auto slot = [&](const EdgeId& e, bool incoming) {
      auto it = net.edges.find(e);
      if (it == net.edges.end()) {
        add("bad slot", vid, "slot references unknown edge '" + e + "'");
        return;
      }
      const NodeId& end = incoming ? it->second.head : it->second.tail;
      if (end != vid) add("bad slot", vid, "edge '" + e + "' is not " + (incoming ? "directed toward" : "directed away from") + " the interaction");
      auto& bucket = incoming ? inSlots : outSlots;
      if (!bucket.insert(e).second) add("bad slot", vid, "edge '" + e + "' used twice");
    };
    slot(v.agentIn, true);
    slot(v.agentOut, false);
    for (const auto& p : v.patients) {
      slot(p.in, true);
      slot(p.out, false);
    }
    for (const auto& [eid, e] : net.edges) {
      if (e.head == vid && !inSlots.count(eid)) add("unpaired patient edge", vid, "incoming edge '" + eid + "' is not paired");
      if (e.tail == vid && !outSlots.count(eid)) add("unpaired patient edge", vid, "outgoing edge '" + eid + "' is not paired");
    }
  }

  if (r.ok() && !topologicalOrder(net)) add("cyclic dependency", "", "edge dependencies form a cycle");
  return r;
}

inline void requireValid(const Network& net) {
  auto report = validate(net);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorKind::InvalidNetwork, v.code + " at '" + v.where + "': " + v.message);
  }
}

/// The interaction whose out-slot holds `e`, with the patient index (-1 for the agent).
inline std::pair<const Interaction*, int> producer(const Network& net, const EdgeId& e) {
  const auto& tail = net.edge(e).tail;
  auto it = net.interactions.find(tail);
  if (it == net.interactions.end()) return {nullptr, -1};
  const auto& v = it->second;
  if (v.agentOut == e) return {&v, -1};
  for (std::size_t i = 0; i < v.patients.size(); ++i)
    if (v.patients[i].out == e) return {&v, static_cast<int>(i)};
  return {nullptr, -1};
}

/// Computes the unique colouring from initial colours. `ops` overrides the
/// weights stored on interactions.
inline Colouring propagate(const Network& net, const InputMap& inputs, const OpMap& ops = {}) {
  requireValid(net);
  Colouring col;
  for (const auto& [vid, v] : net.interactions) {
    auto it = ops.find(vid);
    col.interactionOp[vid] = it != ops.end() ? it->second : v.op;
  }
  const auto order = *topologicalOrder(net);
  for (const auto& e : order) {
    const auto& edge = net.edge(e);
    if (net.isEndpoint(edge.tail)) {
      auto in = inputs.find(e);
      if (in == inputs.end()) throw Error(ErrorKind::MissingInput, "initial edge '" + e + "' has no input colour");
      if (kindOf(in->second) != net.kind) {
        throw Error(ErrorKind::VariantMismatch, "input '" + e + "' is not a " + std::string(to_string(net.kind)) + " colour");
      }
      col.edgeColour.emplace(e, in->second);
      continue;
    }
    const auto& vid = edge.tail;
    const auto& v = net.interactions.at(vid);
    const Colour& agent = col.edgeColour.at(v.agentIn);
    if (v.agentOut == e) {
      col.edgeColour.emplace(e, agent);
      continue;
    }
    for (const auto& p : v.patients) {
      if (p.out != e) continue;
      try {
        col.edgeColour.emplace(e, transition(col.edgeColour.at(p.in), p.mode, col.interactionOp.at(vid), agent));
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::NotInvertibleHere || err.kind() == ErrorKind::SingularCovariance) {
          throw Error(ErrorKind::FusionUndefined, "interaction '" + vid + "': " + err.what());
        }
        throw;
      }
      break;
    }
  }
  return col;
}

/// Initial-edge colours of a colouring.
inline InputMap inputsOf(const Network& net, const Colouring& col) {
  InputMap in;
  for (const auto& e : net.initialEdges()) in.emplace(e, col.at(e));
  return in;
}

inline OpMap opsOf(const Network& net) {
  OpMap ops;
  for (const auto& [vid, v] : net.interactions) ops.emplace(vid, v.op);
  return ops;
}

/// Copies `ops` onto the interactions they name.
inline Network withOps(Network net, const OpMap& ops) {
  for (const auto& [vid, op] : ops) {
    auto it = net.interactions.find(vid);
    if (it != net.interactions.end()) it->second.op = op;
  }
  return net;
}

/// Re-checks both colouring conditions on every interaction.
inline ValidationReport checkColouring(const Network& net, const Colouring& col, double tol = 1e-7) {
  ValidationReport r;
  for (const auto& [vid, v] : net.interactions) {
    const Colour& agent = col.at(v.agentIn);
    if (distance(agent, col.at(v.agentOut)) > tol) r.violations.push_back({"agent colour", vid, "agent in/out differ"});
    const OpParam op = col.interactionOp.count(vid) ? col.interactionOp.at(vid) : v.op;
    for (const auto& p : v.patients) {
      const bool update = p.mode == PatientMode::Update;
      const Colour& src = update ? col.at(p.in) : col.at(p.out);
      const Colour& dst = update ? col.at(p.out) : col.at(p.in);
      if (distance(fuse(src, op, agent), dst) > tol) {
        r.violations.push_back({"patient colour", vid, "pair " + p.in + "->" + p.out + " violates " + std::string(to_string(p.mode))});
      }
    }
  }
  return r;
}

inline std::map<EdgeId, Colour> terminalColours(const Network& net, const Colouring& col) {
  std::map<EdgeId, Colour> out;
  for (const auto& e : net.terminalEdges()) out.emplace(e, col.at(e));
  return out;
}

/// Terminal colours keyed by terminal endpoint; stable across rewrites.
inline std::map<NodeId, Colour> terminalColoursByEndpoint(const Network& net, const Colouring& col) {
  std::map<NodeId, Colour> out;
  for (const auto& e : net.terminalEdges()) out.emplace(net.edge(e).head, col.at(e));
  return out;
}

/// Largest distance between two endpoint-keyed terminal maps (infinity if keys differ).
inline double terminalDiscrepancy(const std::map<NodeId, Colour>& a, const std::map<NodeId, Colour>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& [k, c] : a) {
    auto it = b.find(k);
    if (it == b.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, distance(c, it->second));
  }
  return worst;
}

/// A chain of edges from an initial to a terminal edge, following agent and patient pairs.
struct Process {
  std::vector<EdgeId> edges;
};

inline std::optional<EdgeId> successor(const Network& net, const EdgeId& e) {
  const auto& head = net.edge(e).head;
  auto it = net.interactions.find(head);
  if (it == net.interactions.end()) return std::nullopt;
  const auto& v = it->second;
  if (v.agentIn == e) return v.agentOut;
  for (const auto& p : v.patients)
    if (p.in == e) return p.out;
  return std::nullopt;
}

/// One process per initial edge, ordered by initial edge id.
inline std::vector<Process> processes(const Network& net) {
  std::vector<Process> out;
  for (const auto& start : net.initialEdges()) {
    Process p;
    std::optional<EdgeId> cur = start;
    std::set<EdgeId> seen;
    while (cur && seen.insert(*cur).second) {
      p.edges.push_back(*cur);
      cur = successor(net, *cur);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline bool isAgentOut(const Network& net, const EdgeId& e) {
  auto [v, idx] = producer(net, e);
  return v != nullptr && idx < 0;
}

/// The process with agent in/out pairs identified (agent-out segments dropped).
inline std::vector<EdgeId> logicalEdges(const Network& net, const Process& p) {
  std::vector<EdgeId> out;
  for (const auto& e : p.edges)
    if (!isAgentOut(net, e)) out.push_back(e);
  return out;
}

/// True if some step of the process is a patient transition.
inline bool involvesFusion(const Network& net, const Process& p) {
  for (std::size_t i = 1; i < p.edges.size(); ++i)
    if (!isAgentOut(net, p.edges[i])) return true;
  return false;
}

/// Edges grouped into logical edges: maximal agent in/out chains.
inline std::vector<std::vector<EdgeId>> agentChains(const Network& net) {
  std::map<EdgeId, EdgeId> root;
  std::function<EdgeId(const EdgeId&)> find = [&](const EdgeId& e) -> EdgeId {
    auto it = root.find(e);
    if (it != root.end()) return it->second;
    auto [v, idx] = producer(net, e);
    EdgeId r = (v != nullptr && idx < 0) ? find(v->agentIn) : e;
    root[e] = r;
    return r;
  };
  std::map<EdgeId, std::vector<EdgeId>> groups;
  for (const auto& [id, e] : net.edges) groups[find(id)].push_back(id);
  std::vector<std::vector<EdgeId>> out;
  for (auto& [r, g] : groups) out.push_back(std::move(g));
  return out;
}

/// Logical edges that touch neither an initial nor a terminal endpoint.
inline std::vector<EdgeId> intermediateEdges(const Network& net) {
  std::vector<EdgeId> out;
  for (const auto& chain : agentChains(net)) {
    const bool boundary = std::any_of(chain.begin(), chain.end(),
                                      [&](const EdgeId& e) { return net.isInitialEdge(e) || net.isTerminalEdge(e); });
    if (!boundary) out.insert(out.end(), chain.begin(), chain.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qnet
