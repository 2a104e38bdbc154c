#pragma once

// Dense numeric kernels shared by the models and the baselines. Everything
// here is templated on the Eigen expression type so callers can pass blocks,
// maps or fixed-size matrices without copies.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace riskcal {

/// Default eigenvalue floor for covariance repair.
inline constexpr double kCovarianceFloor = 1e-2;

/// log(sum(exp(v))) with max-subtraction.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

/// Row-wise softmax of an m x r matrix of log-scores.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_rows(
    const Eigen::MatrixBase<Derived>& log_scores) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> p = log_scores;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const Scalar top = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - top).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

/// Largest absolute asymmetry |M - M^T|, scaled by max(1, max|M|).
template <typename Derived>
typename Derived::Scalar relative_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) return std::numeric_limits<Scalar>::infinity();
  if (m.size() == 0) return Scalar(0);
  const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

/// Eigenvalue-floor repair of a symmetric matrix: decompose, clamp every
/// eigenvalue to at least `floor`, reconstruct. Matrices already above the
/// floor are returned unchanged (up to exact symmetrization).
///
/// Throws std::invalid_argument when the input is not symmetric to within
/// 1e-8 (relative to max(1, max|M|)).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> psd_repair(
    const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar floor = kCovarianceFloor) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (!(relative_asymmetry(m) <= Scalar(1e-8)))
    throw std::invalid_argument("psd_repair: matrix is not symmetric");
  Matrix sym = Scalar(0.5) * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw std::invalid_argument("psd_repair: eigensolver failed");
  if (eig.eigenvalues().minCoeff() >= floor) return sym;
  const auto clamped = eig.eigenvalues().cwiseMax(floor);
  Matrix out = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  return Scalar(0.5) * (out + out.transpose());
}

/// Euclidean projection onto the probability simplex {p >= 0, sum p = 1}
/// (sort-and-threshold).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_simplex(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = v.size();
  if (k < 1) throw std::invalid_argument("project_simplex: empty vector");
  std::vector<Scalar> sorted(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) sorted[static_cast<std::size_t>(i)] = v(i);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar running = 0;
  Scalar threshold = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    running += sorted[static_cast<std::size_t>(j)];
    const Scalar candidate = (running - Scalar(1)) / Scalar(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > Scalar(0)) threshold = candidate;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(k);
  for (Eigen::Index i = 0; i < k; ++i) out(i) = std::max(v(i) - threshold, Scalar(0));
  return out;
}

/// Clamp every entry to at least `floor`, then rescale to unit sum.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> clamp_normalize(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar floor) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out = v.cwiseMax(floor);
  return out / out.sum();
}

}  // namespace riskcal
