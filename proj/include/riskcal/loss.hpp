#pragma once

#include <Eigen/Dense>

namespace riskcal {

/// Normalized class distribution p(.|x) for one instance.
class ClassPosterior {
 public:
  /// Validates nonnegativity and unit sum (within 1e-9).
  explicit ClassPosterior(Eigen::VectorXd probs);

  /// Normalizes unnormalized log-scores with max-subtraction.
  static ClassPosterior from_log_scores(const Eigen::VectorXd& log_scores);

  const Eigen::VectorXd& probs() const { return probs_; }
  int class_count() const { return static_cast<int>(probs_.size()); }
  double operator[](int y) const { return probs_(y); }
  /// Most probable class; ties go to the lowest index.
  int argmax() const;

 private:
  Eigen::VectorXd probs_;
};

struct LossSummary {
  double error = 0.0;       // fraction misclassified
  double soft_error = 0.0;  // mean of 1 - p(y|x)
};

/// 1 - p(true_label | x). Throws std::invalid_argument for a bad label.
double soft_loss(const ClassPosterior& posterior, int true_label);

/// 0 when the argmax (lowest index on ties) is the true label, 1 otherwise.
int hard_loss(const ClassPosterior& posterior, int true_label);

/// Index of the largest entry of a row, lowest index on ties.
template <typename Derived>
int argmax_lowest(const Eigen::DenseBase<Derived>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index y = 1; y < row.size(); ++y)
    if (row(y) > row(best)) best = y;
  return static_cast<int>(best);
}

/// Loss summary of an m x r posterior matrix against labels in 0..r-1.
LossSummary losses_from_posteriors(const Eigen::MatrixXd& posteriors, const Eigen::VectorXi& labels);

}  // namespace riskcal
