#include "riskcal/loss.hpp"

#include "riskcal/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace riskcal {

ClassPosterior::ClassPosterior(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) throw std::invalid_argument("posterior must be non-empty");
  if ((probs_.array() < 0.0).any() || !probs_.allFinite())
    throw std::invalid_argument("posterior entries must be finite and nonnegative");
  if (std::abs(probs_.sum() - 1.0) > 1e-9) throw std::invalid_argument("posterior must sum to 1");
}

ClassPosterior ClassPosterior::from_log_scores(const Eigen::VectorXd& log_scores) {
  Eigen::VectorXd p = softmax_rows(log_scores.transpose()).transpose();
  return ClassPosterior(std::move(p));
}

int ClassPosterior::argmax() const { return argmax_lowest(probs_); }

namespace {
void check_label(const ClassPosterior& posterior, int true_label) {
  if (true_label < 0 || true_label >= posterior.class_count())
    throw std::invalid_argument("true label " + std::to_string(true_label) + " out of range");
}
}  // namespace

double soft_loss(const ClassPosterior& posterior, int true_label) {
  check_label(posterior, true_label);
  return 1.0 - posterior[true_label];
}

int hard_loss(const ClassPosterior& posterior, int true_label) {
  check_label(posterior, true_label);
  return posterior.argmax() == true_label ? 0 : 1;
}

LossSummary losses_from_posteriors(const Eigen::MatrixXd& posteriors, const Eigen::VectorXi& labels) {
  if (posteriors.rows() != labels.size() || posteriors.rows() == 0)
    throw std::invalid_argument("posterior rows do not match labels");
  double wrong = 0.0;
  double soft = 0.0;
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
    const int y = labels(i);
    if (y < 0 || y >= posteriors.cols()) throw std::invalid_argument("label out of range");
    soft += 1.0 - posteriors(i, y);
    if (argmax_lowest(posteriors.row(i)) != y) wrong += 1.0;
  }
  const auto m = static_cast<double>(posteriors.rows());
  return {wrong / m, soft / m};
}

}  // namespace riskcal
