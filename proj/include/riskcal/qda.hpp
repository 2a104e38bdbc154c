#pragma once

#include "riskcal/dataset.hpp"
#include "riskcal/linalg.hpp"
#include "riskcal/loss.hpp"
#include "riskcal/naive_bayes.hpp"
#include "riskcal/statistics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace riskcal {

/// Class prior, per-class means and covariances of a Gaussian QDA model.
/// Construction factorizes every covariance; it must be symmetric positive
/// definite.
class QdaParameters {
 public:
  QdaParameters(Eigen::VectorXd class_prior, std::vector<Eigen::VectorXd> means,
                std::vector<Eigen::MatrixXd> covariances);

  int class_count() const { return static_cast<int>(class_prior_.size()); }
  Eigen::Index dimension() const { return means_.front().size(); }

  const Eigen::VectorXd& class_prior() const { return class_prior_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
  const Eigen::VectorXd& mean(int y) const { return means_[static_cast<std::size_t>(y)]; }
  const Eigen::MatrixXd& covariance(int y) const { return covariances_[static_cast<std::size_t>(y)]; }

  /// log |Sigma_y|
  double log_det(int y) const { return log_dets_[static_cast<std::size_t>(y)]; }
  const Eigen::LLT<Eigen::MatrixXd>& factor(int y) const { return factors_[static_cast<std::size_t>(y)]; }

 private:
  Eigen::VectorXd class_prior_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<double> log_dets_;
};

/// Conjugate-prior hyperparameters for the QDA MAP mapping: prior mean and
/// covariance with equivalent sample sizes m1 (mean) and m2 (covariance).
struct QdaMapPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double mean_weight = 10.0;
  double covariance_weight = 10.0;
};

/// Prior centred on the class-unconditional training mean, with the diagonal
/// of the class-unconditional (biased) training covariance.
QdaMapPrior default_map_prior(const Dataset& train, double mean_weight = 10.0,
                              double covariance_weight = 10.0);

/// Moment statistics [count, sum x, sum x x^T] per class from the hard labels.
StatisticsVector qda_statistics(const Dataset& data);

/// Weighted moment statistics; row i of `weights` (m x r) spreads instance i
/// over the class blocks.
StatisticsVector qda_statistics(const Dataset& data, const Eigen::MatrixXd& weights);

/// Maximum likelihood mapping with biased covariances, class counts floored
/// at kCountFloor, and each covariance passed through psd_repair.
QdaParameters qda_ml_params(const StatisticsVector& s, double floor = kCovarianceFloor);

/// MAP mapping: sample moments blended with the prior, class prior from the
/// naive Bayes MAP rule, psd_repair last.
QdaParameters qda_map_params(const StatisticsVector& s, const QdaMapPrior& prior,
                             double floor = kCovarianceFloor);

/// m x r log-joint scores log p(y) - 0.5 log|Sigma_y| - 0.5 Mahalanobis^2,
/// omitting the class-independent constant.
Eigen::MatrixXd qda_log_scores(const QdaParameters& params, const Dataset& data);

Eigen::MatrixXd qda_posteriors(const QdaParameters& params, const Dataset& data);

ClassPosterior qda_posterior(const QdaParameters& params, const Eigen::RowVectorXd& x);

void check_schema(const QdaParameters& params, const Dataset& data);

}  // namespace riskcal
