#pragma once

#include "riskcal/dataset.hpp"
#include "riskcal/loss.hpp"
#include "riskcal/statistics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace riskcal {

enum class Estimator { ML, MAP };

const char* to_string(Estimator estimator);

/// Floor applied to every count (or pseudo-count-augmented count) before a
/// parameter mapping normalizes it.
inline constexpr double kCountFloor = 1e-6;

/// Discrete naive Bayes parameters: p(y) and, per feature, an r x r_i table
/// whose row y is p(x_i | y).
struct NbParameters {
  Eigen::VectorXd class_prior;
  std::vector<Eigen::MatrixXd> cond_tables;

  int class_count() const { return static_cast<int>(class_prior.size()); }
  std::vector<int> cardinalities() const;
};

/// Counting statistics s(X, Y) from the hard labels.
StatisticsVector nb_statistics(const Dataset& data);

/// Weighted counting statistics. Row i of the m x r `weights` gives the mass
/// instance i contributes to each class block; passing posteriors yields
/// s(X, h) = sum_x sum_y p(y|x) s(x, y).
StatisticsVector nb_statistics(const Dataset& data, const Eigen::MatrixXd& weights);

/// Maximum likelihood mapping. Each count is floored at kCountFloor before
/// normalization.
NbParameters nb_ml_params(const StatisticsVector& s);

/// MAP mapping with one pseudo-count per cell (equivalent sample size r for
/// the class prior, r_i for each conditional table).
NbParameters nb_map_params(const StatisticsVector& s);

NbParameters nb_params(const StatisticsVector& s, Estimator estimator);

/// m x r unnormalized log-joint scores log p(y) + sum_i log p(x_i|y).
Eigen::MatrixXd nb_log_scores(const NbParameters& params, const Dataset& data);

/// m x r posterior matrix.
Eigen::MatrixXd nb_posteriors(const NbParameters& params, const Dataset& data);

/// Posterior of a single instance given as a row of categorical codes.
ClassPosterior nb_posterior(const NbParameters& params, const Eigen::RowVectorXd& x);

/// Throws SchemaError when the dataset's categorical schema differs from the
/// parameter tables.
void check_schema(const NbParameters& params, const Dataset& data);

}  // namespace riskcal
