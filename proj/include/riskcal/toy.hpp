#pragma once

#include "riskcal/dataset.hpp"
#include "riskcal/loss.hpp"
#include "riskcal/statistics.hpp"

#include <Eigen/Dense>

namespace riskcal {

/// Two-class univariate Gaussian with equal priors and unit variances; only
/// the class means are learned.
struct ToyParameters {
  Eigen::Vector2d means;
};

/// Three instances X = (0, 1, 4) with labels (first, second, second).
Dataset toy_dataset();

/// Statistics [count, sum x] per class.
StatisticsVector toy_statistics(const Dataset& data);
StatisticsVector toy_statistics(const Dataset& data, const Eigen::MatrixXd& weights);

/// mu_y = sum_y x / count_y, counts floored at kCountFloor.
ToyParameters toy_params(const StatisticsVector& s);

Eigen::MatrixXd toy_posteriors(const ToyParameters& params, const Dataset& data);
ClassPosterior toy_posterior(const ToyParameters& params, double x);

/// Point where both classes are equally probable.
double toy_decision_boundary(const ToyParameters& params);

}  // namespace riskcal
