#include "riskcal/toy.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/linalg.hpp"
#include "riskcal/naive_bayes.hpp"

namespace riskcal {

Dataset toy_dataset() {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 4.0;
  Eigen::VectorXi y(3);
  y << 0, 1, 1;
  return Dataset(std::move(x), std::move(y), {FeatureSpec::continuous()}, 2);
}

StatisticsVector toy_statistics(const Dataset& data) { return toy_statistics(data, data.one_hot_labels()); }

StatisticsVector toy_statistics(const Dataset& data, const Eigen::MatrixXd& weights) {
  if (data.feature_count() != 1 || data.class_count() != 2 || !data.all_continuous())
    throw SchemaError("toy model needs one continuous feature and two classes");
  auto s = StatisticsVector::zeros(ModelFamily::Toy, 2, 1);
  for (int y = 0; y < 2; ++y) {
    s.block(y).count = weights.col(y).sum();
    s.block(y).first(0) = weights.col(y).dot(data.features().col(0));
  }
  return s;
}

ToyParameters toy_params(const StatisticsVector& s) {
  if (s.family() != ModelFamily::Toy || s.class_count() != 2)
    throw std::invalid_argument("toy mapping needs toy statistics");
  if (!s.flatten().allFinite()) throw DegenerateStatisticsError("statistics contain non-finite values");
  ToyParameters p;
  for (int y = 0; y < 2; ++y) p.means(y) = s.block(y).first(0) / std::max(s.block(y).count, kCountFloor);
  return p;
}

Eigen::MatrixXd toy_posteriors(const ToyParameters& params, const Dataset& data) {
  if (data.feature_count() != 1 || data.class_count() != 2)
    throw SchemaError("toy model needs one feature and two classes");
  const auto x = data.features().col(0);
  Eigen::MatrixXd scores(data.size(), 2);
  for (int y = 0; y < 2; ++y) scores.col(y) = -0.5 * (x.array() - params.means(y)).square();
  return softmax_rows(scores);
}

ClassPosterior toy_posterior(const ToyParameters& params, double x) {
  Eigen::VectorXd scores = -0.5 * (x - params.means.array()).square();
  return ClassPosterior::from_log_scores(scores);
}

double toy_decision_boundary(const ToyParameters& params) { return 0.5 * (params.means(0) + params.means(1)); }

}  // namespace riskcal
