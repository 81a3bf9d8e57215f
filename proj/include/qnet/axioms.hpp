#pragma once

#include "qnet/quandloid.hpp"
#include "qnet/random.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace qnet {

/// Largest absolute violation of each quandloid axiom over the sampled triples.
struct AxiomReport {
  QuandloidKind kind = QuandloidKind::Vector;
  int samples = 0;
  double idempotence = 0.0;
  double leftInverse = 0.0;
  double distributivity = 0.0;
  double identity = 0.0;
  /// Trials skipped because an operation was outside its domain.
  int undefined = 0;
  /// Inverse-weight distributivity trials where exactly one side was defined.
  int definednessMismatches = 0;

  double worst() const { return std::max({idempotence, leftInverse, distributivity, identity}); }
  bool passed(double tol) const { return worst() < tol; }
};

namespace detail {

template <class F>
std::optional<Colour> tryEval(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotInvertibleHere) return std::nullopt;
    throw;
  }
}

}  // namespace detail

inline AxiomReport checkAxioms(QuandloidKind kind, int nSamples, std::uint64_t seed, Eigen::Index dim = 3) {
  if (nSamples <= 0) throw Error(ErrorKind::InvalidWeight, "nSamples must be positive");
  Rng rng(seed);
  AxiomReport r;
  r.kind = kind;
  r.samples = nSamples;
  for (int i = 0; i < nSamples; ++i) {
    const Colour a = sample::colour(kind, dim, rng);
    const Colour b = sample::colour(kind, dim, rng);
    const Colour c = sample::colour(kind, dim, rng);
    const OpParam s(sample::weight(rng));
    const OpParam t(sample::weight(rng));

    r.idempotence = std::max(r.idempotence, distance(fuse(a, s, a), a));
    r.identity = std::max(r.identity, distance(fuse(a, OpParam(0.0), b), a));

    r.leftInverse = std::max(r.leftInverse, distance(discount(fuse(a, s, b), s, b), a));
    // the inverse operation must itself be left-invertible, where defined
    if (auto back = detail::tryEval([&] { return discount(a, s, b); })) {
      r.leftInverse = std::max(r.leftInverse, distance(fuse(*back, s, b), a));
    } else {
      ++r.undefined;
    }

    const Colour lhs = fuse(fuse(a, s, b), t, c);
    const Colour rhs = fuse(fuse(a, t, c), s, fuse(b, t, c));
    r.distributivity = std::max(r.distributivity, distance(lhs, rhs));

    // distributivity of a discount over an update
    auto invLhs = detail::tryEval([&] { return discount(fuse(a, s, b), t, c); });
    auto invRhs = detail::tryEval([&] {
      auto ac = discount(a, t, c);
      auto bc = discount(b, t, c);
      return fuse(ac, s, bc);
    });
    if (invLhs && invRhs) {
      r.distributivity = std::max(r.distributivity, distance(*invLhs, *invRhs));
    } else if (invLhs.has_value() != invRhs.has_value()) {
      ++r.definednessMismatches;
    } else {
      ++r.undefined;
    }
  }
  return r;
}

}  // namespace qnet
