#pragma once

#include "qnet/canonical.hpp"
#include "qnet/network.hpp"
#include "qnet/taint.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

namespace qnet {

enum class ObjectiveKind { Chernoff, ConsistencyMargin, TaintCount };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Chernoff: return "chernoff";
    case ObjectiveKind::ConsistencyMargin: return "consistency";
    case ObjectiveKind::TaintCount: return "taint";
  }
  return "?";
}

inline ObjectiveKind objectiveFromString(const std::string& s) {
  for (auto k : {ObjectiveKind::Chernoff, ObjectiveKind::ConsistencyMargin, ObjectiveKind::TaintCount})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::ParseError, "unknown objective '" + s + "'");
}

/// The literal objective is minimized; Maximize flips its sign.
enum class ChernoffSense { Minimize, Maximize };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Chernoff;
  std::optional<RegionSpec> region;
  std::optional<Matrix> trueCov;
  FaultMask mask;
  ChernoffSense sense = ChernoffSense::Minimize;
};

enum class SearchMethod { Grid, Coordinate };

/// log of the integral of exp(logScale - (x-m)' C^-1 (x-m) / 2).
inline double logIntegral(const UnnormalizedGaussian& p) {
  if (!linalg::isSpd(p.cov)) throw Error(ErrorKind::SingularCovariance, "covariance is not SPD");
  const double n = static_cast<double>(p.cov.rows());
  return p.logScale + 0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * linalg::logDetSpd(p.cov);
}

namespace detail {

/// CI networks are evaluated on Gaussians with unit scale, whose means and
/// covariances fuse identically.
inline std::pair<Network, InputMap> asGaussian(const Network& net, const InputMap& inputs) {
  if (net.kind == QuandloidKind::LogLinearGaussian) return {net, inputs};
  if (net.kind != QuandloidKind::CovarianceIntersection) {
    throw Error(ErrorKind::VariantMismatch, "Chernoff objective needs a Gaussian or CI network");
  }
  Network g = net;
  g.kind = QuandloidKind::LogLinearGaussian;
  InputMap in;
  for (const auto& [e, c] : inputs) {
    const auto* est = std::get_if<GaussianEstimate>(&c);
    if (!est) throw Error(ErrorKind::VariantMismatch, "input '" + e + "' is not a CI estimate");
    in.emplace(e, UnnormalizedGaussian{est->mean, est->cov, 0.0});
  }
  return {std::move(g), std::move(in)};
}

}  // namespace detail

/// Sum of logIntegral over the terminal colours of processes that pass
/// through at least one patient transition.
inline double chernoffObjective(const Network& net, const InputMap& inputs, const OpMap& ops = {},
                                ChernoffSense sense = ChernoffSense::Minimize) {
  auto [g, in] = detail::asGaussian(net, inputs);
  const Colouring col = propagate(g, in, ops);
  double total = 0.0;
  for (const auto& p : processes(g)) {
    if (!involvesFusion(g, p)) continue;
    total += logIntegral(std::get<UnnormalizedGaussian>(col.at(p.edges.back())));
  }
  return sense == ChernoffSense::Maximize ? -total : total;
}

struct OptimizeResult {
  OpMap ops;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Minimizes the Chernoff objective over the weights of `free` interactions;
/// the others keep their stored weight.
inline OptimizeResult optimizeParams(const Network& net, const InputMap& inputs, const std::set<InteractionId>& free,
                                     SearchMethod method, double gridStep = 0.05,
                                     ChernoffSense sense = ChernoffSense::Minimize) {
  if (free.empty()) throw Error(ErrorKind::InvalidWeight, "no free interactions");
  if (!(gridStep > 0.0 && gridStep <= 0.5)) throw Error(ErrorKind::InvalidWeight, "grid step must be in (0, 0.5]");
  for (const auto& id : free) net.interaction(id);

  const std::vector<InteractionId> ids(free.begin(), free.end());
  OptimizeResult best;
  best.ops = opsOf(net);
  auto eval = [&](const std::vector<double>& s) {
    ++best.evaluations;
    OpMap ops = opsOf(net);
    for (std::size_t i = 0; i < ids.size(); ++i) ops[ids[i]] = OpParam(s[i]);
    try {
      const double v = chernoffObjective(net, inputs, ops, sense);
      return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto record = [&](const std::vector<double>& s, double v) {
    best.value = v;
    for (std::size_t i = 0; i < ids.size(); ++i) best.ops[ids[i]] = OpParam(s[i]);
  };

  // values closer than this count as ties, so rounding noise cannot break the ordering
  auto better = [](double v, double ref) { return v < ref - 1e-12 * (1.0 + std::abs(ref)); };

  if (method == SearchMethod::Grid) {
    std::vector<double> grid;
    for (int k = 1; k * gridStep <= 1.0 - gridStep + 1e-12; ++k) grid.push_back(k * gridStep);
    std::vector<std::size_t> idx(ids.size(), 0);
    std::vector<double> s(ids.size());
    // lexicographic odometer; strict improvement keeps the smallest vector on ties
    while (true) {
      for (std::size_t i = 0; i < ids.size(); ++i) s[i] = grid[idx[i]];
      const double v = eval(s);
      if (!std::isfinite(best.value) ? v < best.value : better(v, best.value)) record(s, v);
      std::size_t d = ids.size();
      while (d > 0 && ++idx[d - 1] == grid.size()) idx[--d] = 0;
      if (d == 0) break;
    }
    return best;
  }

  constexpr double lo = 0.01, hi = 0.99;
  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> s(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double cur = net.interaction(ids[i]).op.s();
    s[i] = (cur >= lo && cur <= hi) ? cur : 0.5;
  }
  double value = eval(s);
  for (int sweep = 0; sweep < 100; ++sweep) {
    const double before = value;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto along = [&](double x) {
        auto t = s;
        t[i] = x;
        return eval(t);
      };
      double a = lo, b = hi;
      double x1 = b - invPhi * (b - a), x2 = a + invPhi * (b - a);
      double f1 = along(x1), f2 = along(x2);
      while (b - a > 1e-10) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - invPhi * (b - a);
          f1 = along(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + invPhi * (b - a);
          f2 = along(x2);
        }
      }
      const double x = 0.5 * (a + b);
      const double fx = along(x);
      if (better(fx, value)) {
        s[i] = x;
        value = fx;
      }
    }
    if (before - value < 1e-6) break;
  }
  record(s, value);
  return best;
}

inline std::set<InteractionId> allInteractions(const Network& net) {
  std::set<InteractionId> out;
  for (const auto& [id, v] : net.interactions) out.insert(id);
  return out;
}

inline const Matrix& requireTrueCov(const Objective& obj) {
  if (!obj.trueCov) throw Error(ErrorKind::MissingTrueCov, "consistency objective needs a true covariance");
  return *obj.trueCov;
}

/// Lower is better.
inline double localObjective(const Network& net, const Colouring& col, const Objective& obj) {
  switch (obj.kind) {
    case ObjectiveKind::ConsistencyMargin: {
      const Matrix& trueCov = requireTrueCov(obj);
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& e : intermediateEdges(net)) {
        const Colour& c = col.at(e);
        if (const auto* est = std::get_if<GaussianEstimate>(&c)) {
          worst = std::min(worst, consistent(*est, trueCov).margin);
        } else if (const auto* g = std::get_if<UnnormalizedGaussian>(&c)) {
          worst = std::min(worst, consistent(GaussianEstimate{g->mean, g->cov}, trueCov).margin);
        } else {
          throw Error(ErrorKind::VariantMismatch, "consistency margin needs Gaussian colours");
        }
      }
      return -worst;
    }
    case ObjectiveKind::TaintCount:
      if (!obj.region) throw Error(ErrorKind::MissingRegion, "taint objective needs a region");
      return taintCount(net, obj.mask, *obj.region);
    case ObjectiveKind::Chernoff:
      return chernoffObjective(net, inputsOf(net, col), opsOf(net), obj.sense);
  }
  return 0.0;
}

/// Index of the argmin of localObjective; ties go to the smaller canonicalKey.
inline std::size_t selectBestIndex(const std::vector<std::pair<Network, Colouring>>& candidates, const Objective& obj) {
  if (candidates.empty()) throw Error(ErrorKind::InvalidNetwork, "no candidates");
  std::size_t best = 0;
  double bestValue = localObjective(candidates[0].first, candidates[0].second, obj);
  std::string bestKey = canonicalKey(candidates[0].first);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = localObjective(candidates[i].first, candidates[i].second, obj);
    if (v > bestValue) continue;
    std::string key = canonicalKey(candidates[i].first);
    if (v < bestValue || key < bestKey) {
      best = i;
      bestValue = v;
      bestKey = std::move(key);
    }
  }
  return best;
}

inline std::pair<Network, Colouring> selectBest(const std::vector<std::pair<Network, Colouring>>& candidates,
                                                const Objective& obj) {
  return candidates[selectBestIndex(candidates, obj)];
}

}  // namespace qnet
