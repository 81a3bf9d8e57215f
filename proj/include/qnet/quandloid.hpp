#pragma once

// Fusion (update) and discount (left-inverse update) for every colour family.
//
// Linear families combine as (1-s)a + s b. The Gaussian families are linear in
// natural coordinates: precision P = C^-1, information vector h = P m and, for
// unnormalized densities, the log-density constant lambda = logScale - m'Pm/2.
// Covariance intersection is the same map restricted to (P, h). Discount is the
// combination with the inverse weight -s/(1-s); a result outside the family
// (non-PD covariance, negative entropy, ...) raises NotInvertibleHere.

#include "qnet/colour.hpp"

#include <string>

namespace qnet {

namespace detail {

struct Natural {
  Matrix precision;
  Vector info;
  double lambda = 0.0;
};

inline Natural toNatural(const Vector& mean, const Matrix& cov, double logScale) {
  auto precision = linalg::spdInverse(cov);
  if (!precision) throw Error(ErrorKind::SingularCovariance, "covariance cannot be inverted");
  Natural n;
  n.info = *precision * mean;
  n.lambda = logScale - 0.5 * mean.dot(n.info);
  n.precision = std::move(*precision);
  return n;
}

inline Natural combine(const Natural& a, const Natural& b, double w) {
  return Natural{linalg::symmetrize((1.0 - w) * a.precision + w * b.precision), (1.0 - w) * a.info + w * b.info,
                 (1.0 - w) * a.lambda + w * b.lambda};
}

struct Moments {
  Vector mean;
  Matrix cov;
  double logScale = 0.0;
};

inline Moments fromNatural(const Natural& n) {
  if (!(linalg::minEigenvalue(n.precision) > 0.0)) {
    throw Error(ErrorKind::NotInvertibleHere, "fused precision is not positive definite");
  }
  auto cov = linalg::spdInverse(n.precision);
  if (!cov || !(linalg::minEigenvalue(*cov) > kTolPd)) {
    throw Error(ErrorKind::NotInvertibleHere, "fused covariance is not positive definite");
  }
  Moments m;
  m.mean = *cov * n.info;
  m.logScale = n.lambda + 0.5 * n.info.dot(m.mean);
  m.cov = std::move(*cov);
  return m;
}

inline void checkCompatible(const Colour& a, const Colour& b) {
  if (a.index() != b.index()) {
    throw Error(ErrorKind::VariantMismatch, std::string("cannot combine ") + std::string(to_string(kindOf(a))) +
                                                " with " + std::string(to_string(kindOf(b))));
  }
  const bool sameShape = std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, GaussianEstimate> || std::is_same_v<T, UnnormalizedGaussian>) {
          return x.mean.size() == y.mean.size() && x.cov.rows() == y.cov.rows();
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return x.mat.rows() == y.mat.rows() && x.mat.cols() == y.mat.cols();
        } else if constexpr (std::is_same_v<T, Vec>) {
          return x.v.size() == y.v.size();
        } else {
          return true;
        }
      },
      a);
  if (!sameShape) throw Error(ErrorKind::DimensionMismatch, "colours have different dimensions");
}

/// (1-w) a + w b in the family's linear coordinates, validated.
inline Colour combineColours(const Colour& a, const Colour& b, double w) {
  Colour out = std::visit(
      [&b, w](const auto& x) -> Colour {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, GaussianEstimate>) {
          const auto m = fromNatural(combine(toNatural(x.mean, x.cov, 0.0), toNatural(y.mean, y.cov, 0.0), w));
          return GaussianEstimate{m.mean, m.cov};
        } else if constexpr (std::is_same_v<T, UnnormalizedGaussian>) {
          const auto m = fromNatural(
              combine(toNatural(x.mean, x.cov, x.logScale), toNatural(y.mean, y.cov, y.logScale), w));
          return UnnormalizedGaussian{m.mean, m.cov, m.logScale};
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return InfoMatrix{linalg::symmetrize((1.0 - w) * x.mat + w * y.mat)};
        } else if constexpr (std::is_same_v<T, EntropyVal>) {
          double bits = (1.0 - w) * x.bits + w * y.bits;
          // rounding below zero on exact cancellation
          if (bits < 0.0 && bits > -1e-12) bits = 0.0;
          return EntropyVal{bits};
        } else if constexpr (std::is_same_v<T, Density>) {
          return Density{std::exp((1.0 - w) * std::log(x.value) + w * std::log(y.value))};
        } else {
          return Vec{(1.0 - w) * x.v + w * y.v};
        }
      },
      a);
  try {
    checkColour(out);
  } catch (const Error& e) {
    throw Error(ErrorKind::NotInvertibleHere, e.what());
  }
  return out;
}

}  // namespace detail

/// a ▷_s b.
inline Colour fuse(const Colour& a, const OpParam& op, const Colour& b) {
  detail::checkCompatible(a, b);
  checkColour(a);
  checkColour(b);
  if (op.isIdentity()) return a;
  return detail::combineColours(a, b, op.s());
}

/// The unique x with fuse(x, op, b) == c, when it lies inside the family.
inline Colour discount(const Colour& c, const OpParam& op, const Colour& b) {
  detail::checkCompatible(c, b);
  checkColour(c);
  checkColour(b);
  if (op.isIdentity()) return c;
  return detail::combineColours(c, b, op.inverse().s());
}

enum class PatientMode { Update, Discount };

inline std::string_view to_string(PatientMode m) { return m == PatientMode::Update ? "update" : "discount"; }

inline PatientMode opposite(PatientMode m) {
  return m == PatientMode::Update ? PatientMode::Discount : PatientMode::Update;
}

/// fuse or discount depending on the transition mode.
inline Colour transition(const Colour& in, PatientMode mode, const OpParam& op, const Colour& agent) {
  return mode == PatientMode::Update ? fuse(in, op, agent) : discount(in, op, agent);
}

struct ConsistencyReport {
  double margin = 0.0;
  bool ok = false;
};

/// Smallest eigenvalue of est.cov - trueCov; consistent iff >= -kTolPd.
inline ConsistencyReport consistent(const GaussianEstimate& est, const Matrix& trueCov) {
  if (est.cov.rows() != trueCov.rows() || est.cov.cols() != trueCov.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "true covariance shape does not match estimate");
  }
  ConsistencyReport r;
  r.margin = linalg::minEigenvalue(est.cov - trueCov);
  r.ok = r.margin >= -kTolPd;
  return r;
}

}  // namespace qnet
