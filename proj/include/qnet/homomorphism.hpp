#pragma once

#include "qnet/quandloid.hpp"
#include "qnet/random.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

namespace qnet {

/// A structure-preserving map between quandloids: h(a ▷ b) = h(a) h(▷) h(b).
struct Homomorphism {
  std::string name;
  QuandloidKind source = QuandloidKind::LogLinearGaussian;
  Eigen::Index dim = 1;
  std::function<Colour(const Colour&)> mapColour;
  std::function<OpParam(const OpParam&)> mapOp = [](const OpParam& op) { return op; };
};

/// Drops the scale of an unnormalized Gaussian, leaving the CI estimate.
inline Homomorphism ciHomomorphism(Eigen::Index dim = 1) {
  Homomorphism h;
  h.name = "ci";
  h.source = QuandloidKind::LogLinearGaussian;
  h.dim = dim;
  h.mapColour = [](const Colour& c) -> Colour {
    const auto* g = std::get_if<UnnormalizedGaussian>(&c);
    if (!g) throw Error(ErrorKind::VariantMismatch, "ci homomorphism expects an unnormalized Gaussian");
    return GaussianEstimate{g->mean, g->cov};
  };
  return h;
}

/// H = -(1/N) log2(p) for the uniform density p = 2^{-N H} of typical sequences.
inline Homomorphism entropyHomomorphism(int n) {
  if (n <= 0) throw Error(ErrorKind::InvalidWeight, "sequence length N must be positive");
  Homomorphism h;
  h.name = "entropy";
  h.source = QuandloidKind::LogLinearScalar;
  h.dim = 1;
  h.mapColour = [n](const Colour& c) -> Colour {
    const auto* d = std::get_if<Density>(&c);
    if (!d) throw Error(ErrorKind::VariantMismatch, "entropy homomorphism expects a density value");
    if (!(d->value > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "density value must be positive");
    double bits = -std::log2(d->value) / static_cast<double>(n);
    if (bits < 0.0 && bits > -1e-12) bits = 0.0;
    return EntropyVal{bits};
  };
  return h;
}

/// Expected Fisher information of p(X|θ)g(θ) for Gaussian p and prior g: C_p^-1 + C_g^-1.
inline InfoMatrix fisherObserved(const UnnormalizedGaussian& p, const UnnormalizedGaussian& prior) {
  if (p.cov.rows() != prior.cov.rows()) throw Error(ErrorKind::DimensionMismatch, "prior dimension mismatch");
  auto pp = linalg::spdInverse(p.cov);
  auto pg = linalg::spdInverse(prior.cov);
  if (!pp || !pg) throw Error(ErrorKind::SingularCovariance, "covariance cannot be inverted");
  return InfoMatrix{linalg::symmetrize(*pp + *pg)};
}

inline Homomorphism fisherHomomorphism(UnnormalizedGaussian prior) {
  Homomorphism h;
  h.name = "fisher";
  h.source = QuandloidKind::LogLinearGaussian;
  h.dim = prior.mean.size();
  h.mapColour = [prior = std::move(prior)](const Colour& c) -> Colour {
    const auto* g = std::get_if<UnnormalizedGaussian>(&c);
    if (!g) throw Error(ErrorKind::VariantMismatch, "fisher homomorphism expects an unnormalized Gaussian");
    return fisherObserved(*g, prior);
  };
  return h;
}

struct HomomorphismReport {
  std::string name;
  int samples = 0;
  double maxViolation = 0.0;
  int undefined = 0;
};

/// Samples pairs and weights in the source family and compares h(a ▷ b) with h(a) h(▷) h(b).
inline HomomorphismReport verifyHomomorphism(const Homomorphism& h, int nSamples, std::uint64_t seed) {
  if (nSamples <= 0) throw Error(ErrorKind::InvalidWeight, "nSamples must be positive");
  Rng rng(seed);
  HomomorphismReport r;
  r.name = h.name;
  r.samples = nSamples;
  for (int i = 0; i < nSamples; ++i) {
    const Colour a = sample::colour(h.source, h.dim, rng);
    const Colour b = sample::colour(h.source, h.dim, rng);
    const OpParam op(sample::weight(rng));
    try {
      const Colour lhs = h.mapColour(fuse(a, op, b));
      const Colour rhs = fuse(h.mapColour(a), h.mapOp(op), h.mapColour(b));
      r.maxViolation = std::max(r.maxViolation, distance(lhs, rhs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotInvertibleHere) throw;
      ++r.undefined;
    }
  }
  return r;
}

}  // namespace qnet
