#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>

namespace qnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Max abs asymmetry tolerated on covariances.
inline constexpr double kTolSym = 1e-9;
/// Eigenvalue floor for positive (semi)definiteness.
inline constexpr double kTolPd = 1e-10;

namespace linalg {

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline double minEigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline bool isSpd(const Matrix& m) {
  return m.rows() == m.cols() && asymmetry(m) <= kTolSym && minEigenvalue(m) > kTolPd;
}

/// Inverse of a symmetric positive-definite matrix, or nullopt when the
/// Cholesky factorization fails or the result is not numerically PD.
inline std::optional<Matrix> spdInverse(const Matrix& m) {
  const Matrix sym = symmetrize(m);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix inv = symmetrize(llt.solve(Matrix::Identity(m.rows(), m.cols())));
  if (!inv.allFinite()) return std::nullopt;
  return inv;
}

inline double logDetSpd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(symmetrize(m));
  const Matrix l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

}  // namespace linalg
}  // namespace qnet
