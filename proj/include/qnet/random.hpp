#pragma once

#include "qnet/colour.hpp"

#include <cmath>
#include <random>

namespace qnet {

using Rng = std::mt19937_64;

namespace sample {

inline Vector normalVector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

/// A A' + 0.1 I with standard normal A: SPD with bounded conditioning.
inline Matrix spdMatrix(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return linalg::symmetrize(a * a.transpose() + 0.1 * Matrix::Identity(n, n));
}

inline double weight(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 0.95)(rng); }

inline Colour colour(QuandloidKind kind, Eigen::Index dim, Rng& rng) {
  switch (kind) {
    case QuandloidKind::CovarianceIntersection:
      return GaussianEstimate{normalVector(dim, rng), spdMatrix(dim, rng)};
    case QuandloidKind::LogLinearGaussian: {
      Vector mean = normalVector(dim, rng);
      Matrix cov = spdMatrix(dim, rng);
      const double logScale = std::normal_distribution<double>(0.0, 1.0)(rng);
      return UnnormalizedGaussian{std::move(mean), std::move(cov), logScale};
    }
    case QuandloidKind::Fisher:
      return InfoMatrix{spdMatrix(dim, rng)};
    case QuandloidKind::Entropy:
      return EntropyVal{std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
    case QuandloidKind::Vector:
      return Vec{normalVector(dim, rng)};
    case QuandloidKind::LogLinearScalar:
      return Density{std::exp2(-std::uniform_real_distribution<double>(0.0, 8.0)(rng))};
  }
  return Vec{};
}

}  // namespace sample
}  // namespace qnet
