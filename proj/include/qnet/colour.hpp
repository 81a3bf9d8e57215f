#pragma once

#include "qnet/error.hpp"
#include "qnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

namespace qnet {

/// Mean/covariance pair fused by covariance intersection.
struct GaussianEstimate {
  Vector mean;
  Matrix cov;
};

/// exp(logScale - (x-mean)' cov^-1 (x-mean) / 2); the value at the mode is exp(logScale).
struct UnnormalizedGaussian {
  Vector mean;
  Matrix cov;
  double logScale = 0.0;
};

/// Observed Fisher information matrix.
struct InfoMatrix {
  Matrix mat;
};

/// Shannon entropy in bits.
struct EntropyVal {
  double bits = 0.0;
};

/// Element of a plain linear quandloid.
struct Vec {
  Vector v;
};

/// Positive scalar density value (e.g. 2^{-N H} of a typical sequence),
/// fused log-linearly.
struct Density {
  double value = 1.0;
};

using Colour = std::variant<GaussianEstimate, UnnormalizedGaussian, InfoMatrix, EntropyVal, Vec, Density>;

/// Quandloid families; the index matches the Colour alternative.
enum class QuandloidKind {
  CovarianceIntersection = 0,
  LogLinearGaussian = 1,
  Fisher = 2,
  Entropy = 3,
  Vector = 4,
  LogLinearScalar = 5,
};

inline std::string_view to_string(QuandloidKind kind) {
  switch (kind) {
    case QuandloidKind::CovarianceIntersection: return "ci";
    case QuandloidKind::LogLinearGaussian: return "gaussian";
    case QuandloidKind::Fisher: return "fisher";
    case QuandloidKind::Entropy: return "entropy";
    case QuandloidKind::Vector: return "vector";
    case QuandloidKind::LogLinearScalar: return "density";
  }
  return "unknown";
}

inline QuandloidKind kindFromString(std::string_view name) {
  for (auto k : {QuandloidKind::CovarianceIntersection, QuandloidKind::LogLinearGaussian, QuandloidKind::Fisher,
                 QuandloidKind::Entropy, QuandloidKind::Vector, QuandloidKind::LogLinearScalar}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown quandloid kind '" + std::string(name) + "'");
}

inline QuandloidKind kindOf(const Colour& c) { return static_cast<QuandloidKind>(c.index()); }

/// Dimension of the underlying space; scalars report 1.
inline Eigen::Index dimensionOf(const Colour& c) {
  return std::visit(
      [](const auto& x) -> Eigen::Index {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GaussianEstimate> || std::is_same_v<T, UnnormalizedGaussian>) {
          return x.mean.size();
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return x.mat.rows();
        } else if constexpr (std::is_same_v<T, Vec>) {
          return x.v.size();
        } else {
          return 1;
        }
      },
      c);
}

/// A fusion operation identified by its weight. s = 0 is the identity
/// operation; s = 1 is rejected because it has no left inverse.
class OpParam {
 public:
  OpParam() = default;
  explicit OpParam(double s) : s_(s) {
    if (s == 1.0 || !std::isfinite(s)) {
      throw Error(ErrorKind::InvalidWeight, "weight must be finite and != 1, got " + std::to_string(s));
    }
  }

  double s() const noexcept { return s_; }
  bool isIdentity() const noexcept { return s_ == 0.0; }

  /// Weight of the left-inverse operation in linear coordinates.
  OpParam inverse() const { return OpParam(-s_ / (1.0 - s_)); }

  friend bool operator==(const OpParam&, const OpParam&) = default;

 private:
  double s_ = 0.0;
};

namespace detail {

inline void checkCovariance(const Matrix& cov, Eigen::Index n, std::string_view what) {
  if (cov.rows() != n || cov.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": covariance shape does not match mean");
  }
  if (linalg::asymmetry(cov) > kTolSym) {
    throw Error(ErrorKind::SingularCovariance, std::string(what) + ": covariance is not symmetric");
  }
  if (!(linalg::minEigenvalue(cov) > kTolPd)) {
    throw Error(ErrorKind::SingularCovariance, std::string(what) + ": covariance is not positive definite");
  }
}

}  // namespace detail

/// Throws if `c` violates its variant's invariants.
inline void checkColour(const Colour& c) {
  std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GaussianEstimate> || std::is_same_v<T, UnnormalizedGaussian>) {
          detail::checkCovariance(x.cov, x.mean.size(), "gaussian colour");
          if (!x.mean.allFinite()) throw Error(ErrorKind::SingularCovariance, "non-finite mean");
          if constexpr (std::is_same_v<T, UnnormalizedGaussian>) {
            if (!std::isfinite(x.logScale)) throw Error(ErrorKind::SingularCovariance, "non-finite logScale");
          }
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          if (x.mat.rows() != x.mat.cols()) throw Error(ErrorKind::DimensionMismatch, "information matrix not square");
          if (linalg::asymmetry(x.mat) > kTolSym || linalg::minEigenvalue(x.mat) < -kTolPd) {
            throw Error(ErrorKind::NotInvertibleHere, "information matrix not positive semidefinite");
          }
        } else if constexpr (std::is_same_v<T, EntropyVal>) {
          if (!(x.bits >= 0.0) || !std::isfinite(x.bits)) {
            throw Error(ErrorKind::NotInvertibleHere, "entropy must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, Density>) {
          if (!(x.value > 0.0) || !std::isfinite(x.value)) {
            throw Error(ErrorKind::NonPositiveDensity, "density value must be positive and finite");
          }
        } else {
          if (!x.v.allFinite()) throw Error(ErrorKind::NotInvertibleHere, "non-finite vector colour");
        }
      },
      c);
}

namespace detail {

inline bool sameBits(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

inline double maxAbsDiff(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Max absolute componentwise difference (log difference for densities); infinity across variants or shapes.
inline double distance(const Colour& a, const Colour& b) {
  if (a.index() != b.index()) return std::numeric_limits<double>::infinity();
  return std::visit(
      [&b](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, GaussianEstimate>) {
          return std::max(detail::maxAbsDiff(x.mean, y.mean), detail::maxAbsDiff(x.cov, y.cov));
        } else if constexpr (std::is_same_v<T, UnnormalizedGaussian>) {
          return std::max({detail::maxAbsDiff(x.mean, y.mean), detail::maxAbsDiff(x.cov, y.cov),
                           std::abs(x.logScale - y.logScale)});
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return detail::maxAbsDiff(x.mat, y.mat);
        } else if constexpr (std::is_same_v<T, EntropyVal>) {
          return std::abs(x.bits - y.bits);
        } else if constexpr (std::is_same_v<T, Density>) {
          return std::abs(std::log(x.value) - std::log(y.value));
        } else {
          return detail::maxAbsDiff(x.v, y.v);
        }
      },
      a);
}

/// Bitwise equality of every stored number.
inline bool identical(const Colour& a, const Colour& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, GaussianEstimate>) {
          return detail::sameBits(x.mean, y.mean) && detail::sameBits(x.cov, y.cov);
        } else if constexpr (std::is_same_v<T, UnnormalizedGaussian>) {
          return detail::sameBits(x.mean, y.mean) && detail::sameBits(x.cov, y.cov) && x.logScale == y.logScale;
        } else if constexpr (std::is_same_v<T, InfoMatrix>) {
          return detail::sameBits(x.mat, y.mat);
        } else if constexpr (std::is_same_v<T, EntropyVal>) {
          return x.bits == y.bits;
        } else if constexpr (std::is_same_v<T, Density>) {
          return x.value == y.value;
        } else {
          return detail::sameBits(x.v, y.v);
        }
      },
      a);
}

}  // namespace qnet
