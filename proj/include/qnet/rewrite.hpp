#pragma once

// Reidemeister moves as local rewrites of a fusion network.
//
// R1: a ▷ a = a. An interaction whose single patient carries the agent's colour.
// R2: (a ▷ b) ◁ b = a. An update immediately undone by an equal agent.
// R3: (a ▷ b) ▷ c = (a ▷ c) ▷ (b ▷ c). LEFT is the form where b acts on a
//     first, RIGHT the form where c acts on both first.

#include "qnet/canonical.hpp"
#include "qnet/network.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qnet {

enum class MoveKind { R1Intro, R1Elim, R2Intro, R2Elim, R3Left, R3Right };

inline const char* to_string(MoveKind k) {
  switch (k) {
    case MoveKind::R1Intro: return "R1_INTRO";
    case MoveKind::R1Elim: return "R1_ELIM";
    case MoveKind::R2Intro: return "R2_INTRO";
    case MoveKind::R2Elim: return "R2_ELIM";
    case MoveKind::R3Left: return "R3_LEFT";
    case MoveKind::R3Right: return "R3_RIGHT";
  }
  return "?";
}

inline MoveKind moveKindFromString(const std::string& s) {
  for (auto k : {MoveKind::R1Intro, MoveKind::R1Elim, MoveKind::R2Intro, MoveKind::R2Elim, MoveKind::R3Left,
                 MoveKind::R3Right})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::ParseError, "unknown move kind '" + s + "'");
}

using MoveKinds = std::set<MoveKind>;

inline MoveKinds allMoveKinds() {
  return {MoveKind::R1Intro, MoveKind::R1Elim, MoveKind::R2Intro, MoveKind::R2Elim, MoveKind::R3Left, MoveKind::R3Right};
}

/// Moves that need no parameters: eliminations and both R3 directions.
inline MoveKinds reducingMoveKinds() {
  return {MoveKind::R1Elim, MoveKind::R2Elim, MoveKind::R3Left, MoveKind::R3Right};
}

/// Anchors per kind:
///   R1_ELIM   ids {v}
///   R1_INTRO  ids {e}, op, mode
///   R2_ELIM   ids {v1, v2}, slots {i, j}
///   R2_INTRO  ids {e (patient), f (agent)}, op, mode of the first interaction
///   R3_LEFT   ids {v1, v2}, slots {j (a-pair at v2), k (b-pair at v2)}
///   R3_RIGHT  ids {w1, w2}, slots {p (a-pair at w1), q (b-pair at w1)}
struct MoveSite {
  MoveKind kind = MoveKind::R1Elim;
  std::vector<std::string> ids;
  std::vector<int> slots;
  std::optional<OpParam> op;
  PatientMode mode = PatientMode::Update;

  std::string describe() const {
    std::string out = to_string(kind);
    for (const auto& id : ids) out += " " + id;
    for (int s : slots) out += " #" + std::to_string(s);
    if (op) out += " s=" + detail::formatWeight(op->s());
    if (kind == MoveKind::R1Intro || kind == MoveKind::R2Intro) out += " " + std::string(to_string(mode));
    return out;
  }
};

namespace detail {

inline std::string freshId(const Network& net, const std::string& prefix) {
  for (int k = 0;; ++k) {
    std::string id = prefix + std::to_string(k);
    if (!net.edges.count(id) && !net.interactions.count(id) && !net.endpoints.count(id)) return id;
  }
}

/// Renames an in-slot (agentIn, patient in) or out-slot reference at a node.
inline void renameSlot(Network& net, const NodeId& node, const EdgeId& from, const EdgeId& to, bool incoming) {
  auto it = net.interactions.find(node);
  if (it == net.interactions.end()) return;
  auto& v = it->second;
  auto& agent = incoming ? v.agentIn : v.agentOut;
  if (agent == from) agent = to;
  for (auto& p : v.patients) {
    auto& slot = incoming ? p.in : p.out;
    if (slot == from) slot = to;
  }
}

/// Joins x (into a node being removed) with y (out of it). Endpoint-adjacent
/// ids survive so inputs and terminals stay addressable.
inline EdgeId mergeEdges(Network& net, const EdgeId& x, const EdgeId& y) {
  const Edge ex = net.edge(x), ey = net.edge(y);
  const bool keepX = net.isInitialEdge(x) || !net.isTerminalEdge(y);
  const EdgeId keep = keepX ? x : y, drop = keepX ? y : x;
  net.edges.erase(drop);
  net.edges[keep] = Edge{ex.tail, ey.head};
  if (keepX) {
    renameSlot(net, ey.head, y, x, true);
  } else {
    renameSlot(net, ex.tail, x, y, false);
  }
  return keep;
}

/// Cuts edge e at a new node: returns (segment into node, segment out of node).
inline std::pair<EdgeId, EdgeId> splitEdge(Network& net, const EdgeId& e, const NodeId& node) {
  const Edge old = net.edge(e);
  const EdgeId fresh = freshId(net, "_e");
  const bool lastKeeps = net.isTerminalEdge(e) && !net.isInitialEdge(e);
  const EdgeId first = lastKeeps ? fresh : e, second = lastKeeps ? e : fresh;
  net.edges.erase(e);
  net.edges[first] = Edge{old.tail, node};
  net.edges[second] = Edge{node, old.head};
  if (lastKeeps) {
    renameSlot(net, old.tail, e, first, false);
  } else {
    renameSlot(net, old.head, e, second, true);
  }
  return {first, second};
}

/// Removes patient pair i of v, joining its in and out edges.
inline void removePatient(Network& net, const InteractionId& vid, int i) {
  auto& v = net.interactions.at(vid);
  const PatientPair p = v.patients.at(static_cast<std::size_t>(i));
  v.patients.erase(v.patients.begin() + i);
  mergeEdges(net, p.in, p.out);
}

/// Removes a patient-less interaction, joining its agent edges.
inline void dissolve(Network& net, const InteractionId& vid) {
  const Interaction v = net.interactions.at(vid);
  net.interactions.erase(vid);
  mergeEdges(net, v.agentIn, v.agentOut);
}

inline int patientIndexIn(const Interaction& v, const EdgeId& e) {
  for (std::size_t i = 0; i < v.patients.size(); ++i)
    if (v.patients[i].in == e) return static_cast<int>(i);
  return -1;
}

inline bool sameColour(const Colouring& col, const EdgeId& a, const EdgeId& b, double tol = 1e-9) {
  return distance(col.at(a), col.at(b)) <= tol;
}

inline bool isAcyclicValid(const Network& net) { return validate(net).ok(); }

}  // namespace detail

/// Every site of the requested kinds. Introduction sites are generated for
/// each weight in `introOps` (both modes); sites whose result would be
/// invalid are omitted.
inline std::vector<MoveSite> findMoves(const Network& net, const Colouring& col, const MoveKinds& kinds,
                                       const std::vector<OpParam>& introOps = {});

/// Applies a site, recomputing the colouring from the same inputs.
inline std::pair<Network, Colouring> applyMove(const Network& net, const Colouring& col, const MoveSite& site);

namespace detail {

inline Network rewrite(const Network& net, const Colouring& col, const MoveSite& site) {
  auto invalid = [&site](const std::string& why) {
    return Error(ErrorKind::InvalidSite, site.describe() + ": " + why);
  };
  auto need = [&](std::size_t ids, std::size_t slots) {
    if (site.ids.size() != ids || site.slots.size() != slots) throw invalid("wrong number of anchors");
  };
  auto interactionAt = [&](const std::string& id) -> const Interaction& {
    auto it = net.interactions.find(id);
    if (it == net.interactions.end()) throw invalid("no interaction '" + id + "'");
    return it->second;
  };
  Network out = net;

  switch (site.kind) {
    case MoveKind::R1Elim: {
      need(1, 0);
      const auto& v = interactionAt(site.ids[0]);
      if (v.patients.size() != 1) throw invalid("interaction must have a single patient");
      if (!sameColour(col, v.agentIn, v.patients[0].in)) throw invalid("agent and patient colours differ");
      if (v.agentOut == v.patients[0].in) {
        // the kink: agent strand feeds back into itself as the patient
        const EdgeId in = v.agentIn, loop = v.agentOut, outE = v.patients[0].out;
        out.interactions.erase(site.ids[0]);
        out.edges.erase(loop);
        const Edge ein = out.edge(in), eout = out.edge(outE);
        const bool keepIn = out.isInitialEdge(in) || !out.isTerminalEdge(outE);
        const EdgeId keep = keepIn ? in : outE, drop = keepIn ? outE : in;
        out.edges.erase(drop);
        out.edges[keep] = Edge{ein.tail, eout.head};
        if (keepIn) {
          renameSlot(out, eout.head, outE, in, true);
        } else {
          renameSlot(out, ein.tail, in, outE, false);
        }
      } else {
        removePatient(out, site.ids[0], 0);
        dissolve(out, site.ids[0]);
      }
      return out;
    }
    case MoveKind::R1Intro: {
      need(1, 0);
      if (!site.op) throw invalid("missing weight");
      const EdgeId e = site.ids[0];
      if (!net.edges.count(e)) throw invalid("no edge '" + e + "'");
      const InteractionId vid = freshId(out, "_v");
      out.interactions[vid];  // reserve the id before allocating edges
      auto [first, second] = splitEdge(out, e, vid);
      const EdgeId loop = freshId(out, "_e");
      out.edges[loop] = Edge{vid, vid};
      out.interactions[vid] = Interaction{first, loop, {PatientPair{loop, second, site.mode}}, *site.op};
      return out;
    }
    case MoveKind::R2Elim: {
      need(2, 2);
      const auto& v1 = interactionAt(site.ids[0]);
      const auto& v2 = interactionAt(site.ids[1]);
      if (site.ids[0] == site.ids[1]) throw invalid("interactions must differ");
      const int i = site.slots[0], j = site.slots[1];
      if (i < 0 || j < 0 || i >= static_cast<int>(v1.patients.size()) || j >= static_cast<int>(v2.patients.size()))
        throw invalid("slot out of range");
      const auto& p1 = v1.patients[i];
      const auto& p2 = v2.patients[j];
      if (p1.out != p2.in) throw invalid("pairs are not consecutive");
      if (p1.mode == p2.mode) throw invalid("modes must be opposite");
      if (std::abs(v1.op.s() - v2.op.s()) > 1e-12) throw invalid("weights differ");
      if (!sameColour(col, v1.agentIn, v2.agentIn)) throw invalid("agent colours differ");
      const EdgeId in = p1.in, mid = p1.out, outE = p2.out;
      auto& w1 = out.interactions.at(site.ids[0]);
      auto& w2 = out.interactions.at(site.ids[1]);
      w1.patients.erase(w1.patients.begin() + i);
      w2.patients.erase(w2.patients.begin() + j);
      // in -> mid -> out collapses to one edge
      const Edge ein = out.edge(in), eout = out.edge(outE);
      out.edges.erase(mid);
      const bool keepIn = out.isInitialEdge(in) || !out.isTerminalEdge(outE);
      const EdgeId keep = keepIn ? in : outE, drop = keepIn ? outE : in;
      out.edges.erase(drop);
      out.edges[keep] = Edge{ein.tail, eout.head};
      if (keepIn) {
        renameSlot(out, eout.head, outE, in, true);
      } else {
        renameSlot(out, ein.tail, in, outE, false);
      }
      for (const auto& id : {site.ids[0], site.ids[1]})
        if (out.interactions.at(id).patients.empty()) dissolve(out, id);
      return out;
    }
    case MoveKind::R2Intro: {
      need(2, 0);
      if (!site.op) throw invalid("missing weight");
      const EdgeId e = site.ids[0], f = site.ids[1];
      if (e == f || !net.edges.count(e) || !net.edges.count(f)) throw invalid("need two distinct edges");
      const InteractionId v1 = freshId(out, "_v");
      out.interactions[v1];
      const InteractionId v2 = freshId(out, "_v");
      out.interactions[v2];
      // f: f1 -> v1 -> fm -> v2 -> f2, e: e1 -> v1 -> m -> v2 -> e2
      auto [f1, fRest] = splitEdge(out, f, v1);
      out.edges[fRest].tail = v2;
      const EdgeId fm = freshId(out, "_e");
      out.edges[fm] = Edge{v1, v2};
      auto [e1, eRest] = splitEdge(out, e, v1);
      out.edges[eRest].tail = v2;
      const EdgeId m = freshId(out, "_e");
      out.edges[m] = Edge{v1, v2};
      out.interactions[v1] = Interaction{f1, fm, {PatientPair{e1, m, site.mode}}, *site.op};
      out.interactions[v2] = Interaction{fm, fRest, {PatientPair{m, eRest, opposite(site.mode)}}, *site.op};
      return out;
    }
    case MoveKind::R3Left: {
      need(2, 2);
      const auto& v1 = interactionAt(site.ids[0]);
      const auto& v2 = interactionAt(site.ids[1]);
      const int j = site.slots[0], k = site.slots[1];
      if (site.ids[0] == site.ids[1] || v1.patients.size() != 1 || v2.patients.size() != 2 || j == k || j < 0 ||
          k < 0 || j > 1 || k > 1)
        throw invalid("pattern mismatch");
      const auto& pa = v1.patients[0];
      const auto& pj = v2.patients[j];
      const auto& pk = v2.patients[k];
      if (pj.in != pa.out || pk.in != v1.agentOut || pj.mode != pk.mode) throw invalid("pattern mismatch");
      const EdgeId aIn = pa.in, aMid = pa.out, aOut = pj.out;
      const EdgeId bIn = v1.agentIn, bMid = v1.agentOut, bOut = pk.out;
      const PatientMode m1 = pa.mode, m2 = pj.mode;
      auto& c = out.interactions.at(site.ids[1]);
      std::vector<PatientPair> pairs(2);
      pairs[j] = PatientPair{aIn, aMid, m2};
      pairs[k] = PatientPair{bIn, bMid, m2};
      c.patients = pairs;
      auto& ab = out.interactions.at(site.ids[0]);
      ab.agentIn = bMid;
      ab.agentOut = bOut;
      ab.patients = {PatientPair{aMid, aOut, m1}};
      const auto& cid = site.ids[1];
      const auto& abid = site.ids[0];
      out.edges[aIn].head = cid;
      out.edges[bIn].head = cid;
      out.edges[aMid] = Edge{cid, abid};
      out.edges[bMid] = Edge{cid, abid};
      out.edges[aOut].tail = abid;
      out.edges[bOut].tail = abid;
      return out;
    }
    case MoveKind::R3Right: {
      need(2, 2);
      const auto& w1 = interactionAt(site.ids[0]);
      const auto& w2 = interactionAt(site.ids[1]);
      const int p = site.slots[0], q = site.slots[1];
      if (site.ids[0] == site.ids[1] || w1.patients.size() != 2 || w2.patients.size() != 1 || p == q || p < 0 ||
          q < 0 || p > 1 || q > 1)
        throw invalid("pattern mismatch");
      const auto& pp = w1.patients[p];
      const auto& pq = w1.patients[q];
      const auto& pw = w2.patients[0];
      if (pp.mode != pq.mode || w2.agentIn != pq.out || pw.in != pp.out) throw invalid("pattern mismatch");
      const EdgeId aIn = pp.in, aMid = pp.out, aOut = pw.out;
      const EdgeId bIn = pq.in, bMid = pq.out, bOut = w2.agentOut;
      const PatientMode m1 = pw.mode, m2 = pp.mode;
      const auto& cid = site.ids[0];
      const auto& abid = site.ids[1];
      auto& ab = out.interactions.at(abid);
      ab.agentIn = bIn;
      ab.agentOut = bMid;
      ab.patients = {PatientPair{aIn, aMid, m1}};
      auto& c = out.interactions.at(cid);
      std::vector<PatientPair> pairs(2);
      pairs[p] = PatientPair{aMid, aOut, m2};
      pairs[q] = PatientPair{bMid, bOut, m2};
      c.patients = pairs;
      out.edges[aIn].head = abid;
      out.edges[bIn].head = abid;
      out.edges[aMid] = Edge{abid, cid};
      out.edges[bMid] = Edge{abid, cid};
      out.edges[aOut].tail = cid;
      out.edges[bOut].tail = cid;
      return out;
    }
  }
  throw invalid("unknown move");
}

}  // namespace detail

inline std::pair<Network, Colouring> applyMove(const Network& net, const Colouring& col, const MoveSite& site) {
  Network out = detail::rewrite(net, col, site);
  auto report = validate(out);
  if (!report.ok()) {
    throw Error(ErrorKind::InvalidSite, site.describe() + ": result invalid (" + report.violations.front().code + ")");
  }
  Colouring next = propagate(out, inputsOf(net, col));
  return {std::move(out), std::move(next)};
}

inline std::vector<MoveSite> findMoves(const Network& net, const Colouring& col, const MoveKinds& kinds,
                                       const std::vector<OpParam>& introOps) {
  std::vector<MoveSite> sites;
  auto want = [&kinds](MoveKind k) { return kinds.count(k) != 0; };
  // introductions are cheap to build but may close a cycle; keep only valid ones
  auto keepIfValid = [&](MoveSite s) {
    try {
      if (detail::isAcyclicValid(detail::rewrite(net, col, s))) sites.push_back(std::move(s));
    } catch (const Error&) {
    }
  };

  if (want(MoveKind::R1Elim)) {
    for (const auto& [vid, v] : net.interactions)
      if (v.patients.size() == 1 && detail::sameColour(col, v.agentIn, v.patients[0].in))
        sites.push_back(MoveSite{MoveKind::R1Elim, {vid}, {}, std::nullopt, v.patients[0].mode});
  }
  if (want(MoveKind::R2Elim)) {
    for (const auto& [vid, v] : net.interactions) {
      for (std::size_t i = 0; i < v.patients.size(); ++i) {
        const auto& head = net.edge(v.patients[i].out).head;
        auto it = net.interactions.find(head);
        if (it == net.interactions.end() || head == vid) continue;
        const auto& w = it->second;
        const int j = detail::patientIndexIn(w, v.patients[i].out);
        if (j < 0 || w.patients[j].mode == v.patients[i].mode) continue;
        if (std::abs(v.op.s() - w.op.s()) > 1e-12 || !detail::sameColour(col, v.agentIn, w.agentIn)) continue;
        sites.push_back(MoveSite{MoveKind::R2Elim, {vid, head}, {static_cast<int>(i), j}, std::nullopt, v.patients[i].mode});
      }
    }
  }
  if (want(MoveKind::R3Left)) {
    for (const auto& [vid, v] : net.interactions) {
      if (v.patients.size() != 1) continue;
      const auto& head = net.edge(v.patients[0].out).head;
      auto it = net.interactions.find(head);
      if (it == net.interactions.end() || head == vid || it->second.patients.size() != 2) continue;
      const auto& w = it->second;
      const int j = detail::patientIndexIn(w, v.patients[0].out);
      const int k = detail::patientIndexIn(w, v.agentOut);
      if (j < 0 || k < 0 || w.patients[j].mode != w.patients[k].mode) continue;
      sites.push_back(MoveSite{MoveKind::R3Left, {vid, head}, {j, k}, std::nullopt, w.patients[j].mode});
    }
  }
  if (want(MoveKind::R3Right)) {
    for (const auto& [wid, w] : net.interactions) {
      if (w.patients.size() != 2 || w.patients[0].mode != w.patients[1].mode) continue;
      for (int q = 0; q < 2; ++q) {
        const int p = 1 - q;
        const auto& head = net.edge(w.patients[q].out).head;
        auto it = net.interactions.find(head);
        if (it == net.interactions.end() || head == wid) continue;
        const auto& v = it->second;
        if (v.agentIn != w.patients[q].out || v.patients.size() != 1 || v.patients[0].in != w.patients[p].out) continue;
        sites.push_back(MoveSite{MoveKind::R3Right, {wid, head}, {p, q}, std::nullopt, w.patients[p].mode});
      }
    }
  }
  if (want(MoveKind::R1Intro)) {
    for (const auto& op : introOps)
      for (const auto& [eid, e] : net.edges)
        for (auto mode : {PatientMode::Update, PatientMode::Discount})
          keepIfValid(MoveSite{MoveKind::R1Intro, {eid}, {}, op, mode});
  }
  if (want(MoveKind::R2Intro)) {
    for (const auto& op : introOps)
      for (const auto& [eid, e] : net.edges)
        for (const auto& [fid, f] : net.edges)
          if (eid != fid)
            for (auto mode : {PatientMode::Update, PatientMode::Discount})
              keepIfValid(MoveSite{MoveKind::R2Intro, {eid, fid}, {}, op, mode});
  }
  return sites;
}

/// Distinct weights used by the network, ascending.
inline std::vector<OpParam> networkOps(const Network& net) {
  std::set<double> ss;
  for (const auto& [vid, v] : net.interactions) ss.insert(v.op.s());
  std::vector<OpParam> out;
  for (double s : ss) out.emplace_back(s);
  return out;
}

struct ClassMember {
  Network net;
  Colouring col;
  std::vector<MoveSite> path;
  std::string key;
};

struct EquivalenceClass {
  std::vector<ClassMember> members;
  bool truncated = false;
};

struct SearchOptions {
  MoveKinds kinds = reducingMoveKinds();
  /// Weights offered to introduction moves; empty means the network's own weights.
  std::vector<OpParam> introOps;
};

/// Breadth-first closure under moves, at most `depth` moves from the input.
/// Members are deduplicated up to internal relabelling; each level is
/// ordered by canonicalKey. The input is always the first member.
inline EquivalenceClass equivalenceClass(const Network& net, const Colouring& col, int depth, int maxNodes,
                                         const SearchOptions& opts = {}) {
  EquivalenceClass cls;
  const auto introOps = opts.introOps.empty() ? networkOps(net) : opts.introOps;
  std::set<std::string> seen{anchoredKey(net)};
  cls.members.push_back(ClassMember{net, col, {}, canonicalKey(net)});
  std::vector<std::size_t> frontier{0};
  for (int level = 0; level < depth && !frontier.empty() && !cls.truncated; ++level) {
    std::vector<ClassMember> next;
    for (std::size_t idx : frontier) {
      const ClassMember cur = cls.members[idx];
      for (const auto& site : findMoves(cur.net, cur.col, opts.kinds, introOps)) {
        std::pair<Network, Colouring> moved;
        try {
          moved = applyMove(cur.net, cur.col, site);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::FusionUndefined || e.kind() == ErrorKind::InvalidSite) continue;
          throw;
        }
        if (!seen.insert(anchoredKey(moved.first)).second) continue;
        auto path = cur.path;
        path.push_back(site);
        std::string key = canonicalKey(moved.first);
        next.push_back(ClassMember{std::move(moved.first), std::move(moved.second), std::move(path), std::move(key)});
      }
    }
    std::stable_sort(next.begin(), next.end(), [](const ClassMember& a, const ClassMember& b) { return a.key < b.key; });
    frontier.clear();
    for (auto& m : next) {
      if (maxNodes > 0 && static_cast<int>(cls.members.size()) >= maxNodes) {
        cls.truncated = true;
        break;
      }
      frontier.push_back(cls.members.size());
      cls.members.push_back(std::move(m));
    }
  }
  return cls;
}

}  // namespace qnet
