#pragma once

// Fault isolation by sliding tainted strands out of a protected region, and
// the two-stage loop: optimize weights globally, then pick the member of the
// equivalence class that keeps the current faults away from the region.

#include "qnet/canonical.hpp"
#include "qnet/optimizer.hpp"
#include "qnet/rewrite.hpp"
#include "qnet/serialize.hpp"
#include "qnet/taint.hpp"

#include <limits>
#include <string>
#include <tuple>
#include <vector>

namespace qnet {

struct IsolationReport {
  bool achieved = false;
  int taintBefore = 0;
  int taintAfter = 0;
  std::vector<MoveSite> moves;
  int candidates = 0;
  bool truncated = false;
};

struct SlideResult {
  Network net;
  Colouring col;
  IsolationReport report;
};

struct SlideOptions {
  /// Also offer R2 introductions, with the network's own weights.
  bool allowIntro = false;
  int maxNodes = 50000;
};

/// Searches the R2/R3 neighbourhood for the network with the least taint
/// inside the region; fewer moves, then canonicalKey, break ties.
inline SlideResult slideIsolate(const Network& net, const Colouring& col, const FaultMask& mask,
                                const RegionSpec& region, int depth, const SlideOptions& opts = {}) {
  SlideResult best{net, col, {}};
  best.report.taintBefore = taintCount(net, mask, region);
  best.report.taintAfter = best.report.taintBefore;
  if (best.report.taintBefore > 0 && depth > 0) {
    SearchOptions search;
    search.kinds = {MoveKind::R2Elim, MoveKind::R3Left, MoveKind::R3Right};
    if (opts.allowIntro) search.kinds.insert(MoveKind::R2Intro);
    const auto cls = equivalenceClass(net, col, depth, opts.maxNodes, search);
    best.report.candidates = static_cast<int>(cls.members.size());
    best.report.truncated = cls.truncated;
    auto score = [&](const ClassMember& m) {
      return std::make_tuple(taintCount(m.net, mask, region), m.path.size(), m.key);
    };
    const ClassMember* chosen = &cls.members.front();
    auto chosenScore = score(*chosen);
    for (const auto& m : cls.members) {
      auto s = score(m);
      if (s < chosenScore) {
        chosen = &m;
        chosenScore = std::move(s);
      }
    }
    best.net = chosen->net;
    best.col = chosen->col;
    best.report.moves = chosen->path;
    best.report.taintAfter = std::get<0>(chosenScore);
  }
  best.report.achieved = best.report.taintAfter == 0;
  return best;
}

struct RunStep {
  int step = 0;
  FaultMask mask;
  std::string key;
  int taintBefore = 0;
  int taintInRegion = 0;
  bool isolated = false;
  std::vector<MoveSite> moves;
  OpMap ops;
  std::optional<double> globalObjective;
  double localObjective = 0.0;
  std::map<NodeId, Colour> terminals;
  double maxDeviation = 0.0;
  bool conserved = true;
  std::string error;
  Network net;
};

struct RunTrace {
  std::vector<RunStep> steps;
};

struct AdaptiveOptions {
  SearchMethod method = SearchMethod::Grid;
  double gridStep = 0.05;
  /// Interactions whose weight is optimized; empty means all.
  std::set<InteractionId> free;
  bool optimize = true;
  SlideOptions slide;
};

/// Per step: (1) optimize weights on the base wiring, (2) slide the step's
/// faults out of the region, (3) record the chosen wiring and terminals.
/// Every chosen wiring is compared against the base wiring with the same
/// inputs and weights.
inline RunTrace adaptiveRun(const Network& net, const InputMap& inputs, const Timeline& timeline,
                            const RegionSpec& region, const Objective& globalObj, int depth,
                            const AdaptiveOptions& opts = {}) {
  if (timeline.empty()) throw Error(ErrorKind::InvalidNetwork, "timeline is empty");
  for (std::size_t i = 1; i < timeline.size(); ++i)
    if (timeline[i].step <= timeline[i - 1].step) throw Error(ErrorKind::ParseError, "timeline steps must increase");
  const bool gaussian = net.kind == QuandloidKind::CovarianceIntersection || net.kind == QuandloidKind::LogLinearGaussian;
  RunTrace trace;
  for (const auto& ts : timeline) {
    RunStep rec;
    rec.step = ts.step;
    rec.mask = ts.mask;
    rec.net = net;
    try {
      const InputMap in = applyOverrides(inputs, ts.mask);
      Network base = net;
      if (opts.optimize && gaussian && !net.interactions.empty()) {
        const auto free = opts.free.empty() ? allInteractions(net) : opts.free;
        auto best = optimizeParams(net, in, free, opts.method, opts.gridStep, globalObj.sense);
        base = withOps(net, best.ops);
      }
      rec.ops = opsOf(base);
      const Colouring baseCol = propagate(base, in);
      auto slid = slideIsolate(base, baseCol, ts.mask, region, depth, opts.slide);
      rec.net = slid.net;
      rec.key = canonicalKey(slid.net);
      rec.taintBefore = slid.report.taintBefore;
      rec.taintInRegion = slid.report.taintAfter;
      rec.isolated = slid.report.achieved;
      rec.moves = slid.report.moves;
      rec.terminals = terminalColoursByEndpoint(slid.net, slid.col);
      rec.maxDeviation = terminalDiscrepancy(rec.terminals, terminalColoursByEndpoint(base, baseCol));
      rec.conserved = rec.maxDeviation <= 1e-7;
      if (gaussian) rec.globalObjective = chernoffObjective(slid.net, in, {}, globalObj.sense);
      Objective local = globalObj;
      local.mask = ts.mask;
      if (local.kind == ObjectiveKind::TaintCount && !local.region) local.region = region;
      rec.localObjective = localObjective(slid.net, slid.col, local);
    } catch (const Error& e) {
      rec.error = std::string(to_string(e.kind())) + ": " + e.what();
      rec.conserved = false;
    }
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

/// One JSON record per step.
inline Json runStepToJson(const RunStep& s, const std::vector<EdgeId>& faultOrder = {}) {
  Json j;
  j["step"] = s.step;
  j["mask"] = faultOrder.empty() ? Json(s.mask.faulty) : Json(faultCode(s.mask, faultOrder));
  j["key"] = s.key;
  j["taintBefore"] = s.taintBefore;
  j["taint"] = s.taintInRegion;
  j["isolated"] = s.isolated;
  Json moves = Json::array();
  for (const auto& m : s.moves) moves.push_back(m.describe());
  j["moves"] = moves;
  Json ops = Json::object();
  for (const auto& [id, op] : s.ops) ops[id] = op.s();
  j["ops"] = ops;
  Json terms = Json::object();
  for (const auto& [ep, c] : s.terminals) terms[ep] = colourToJson(c);
  j["terminals"] = terms;
  j["objective"] = Json{{"global", s.globalObjective ? Json(*s.globalObjective) : Json(nullptr)},
                        {"local", std::isfinite(s.localObjective) ? Json(s.localObjective) : Json(nullptr)}};
  j["conserved"] = s.conserved;
  j["maxDeviation"] = std::isfinite(s.maxDeviation) ? Json(s.maxDeviation) : Json(nullptr);
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

inline std::string traceToJsonLines(const RunTrace& t, const std::vector<EdgeId>& faultOrder = {}) {
  std::string out;
  for (const auto& s : t.steps) out += runStepToJson(s, faultOrder).dump() + "\n";
  return out;
}

}  // namespace qnet
