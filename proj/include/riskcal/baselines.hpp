#pragma once

#include "riskcal/calibrate.hpp"
#include "riskcal/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace riskcal {

/// Exponential-family parameters of naive Bayes: log p(y) and, per feature,
/// an r x r_i table of log p(x_i | y).
struct NaturalParamsNb {
  Eigen::VectorXd eta0;
  std::vector<Eigen::MatrixXd> eta_tables;
};

/// Exponential-family parameters of QDA: log p(y), Sigma^-1 mu, -1/2 Sigma^-1.
struct NaturalParamsQda {
  Eigen::VectorXd eta0;
  std::vector<Eigen::VectorXd> eta1;
  std::vector<Eigen::MatrixXd> eta2;
};

NaturalParamsNb to_natural(const NbParameters& params);
NaturalParamsQda to_natural(const QdaParameters& params);

/// Exponentiate, project onto the simplex, floor at kCountFloor.
NbParameters project_natural(const NaturalParamsNb& eta);

/// Prior as for naive Bayes; Sigma = -1/2 eta2^-1 followed by psd_repair
/// (directions where eta2 is not negative definite collapse to the floor);
/// mu = Sigma eta1.
QdaParameters project_natural(const NaturalParamsQda& eta, double floor = kCovarianceFloor);

/// Gradient of the average log loss -1/m sum log p(y|x) with respect to the
/// natural parameters, evaluated at `params`. Same layout as NaturalParamsNb.
NaturalParamsNb nb_log_loss_gradient(const NbParameters& params, const Dataset& data);

/// As above for QDA. The eta2 block is d/d(eta2) of the loss, per entry,
/// i.e. 1/m sum (p(y'|x) - [y = y']) (x x^T - mu mu^T - Sigma).
NaturalParamsQda qda_log_loss_gradient(const QdaParameters& params, const Dataset& data);

/// Average log loss, for diagnostics.
double average_log_loss(const Eigen::MatrixXd& posteriors, const Eigen::VectorXi& labels);

/// Projected gradient descent on the average log loss.
FitResult<NbParameters> gd_fit_nb(const Dataset& data, const NbParameters& init, const RcConfig& config);
FitResult<QdaParameters> gd_fit_qda(const Dataset& data, const QdaParameters& init, const RcConfig& config,
                                    double floor = kCovarianceFloor);

/// Discriminative frequency estimate: each pass adds (1 - p(y|x)) s(x, y)
/// for every instance and re-maps parameters with the family's estimator.
/// Starts from s(X, Y). `config.learning_rate` is ignored.
FitResult<NbParameters> dfe_fit(const Dataset& data, const NaiveBayesFamily& family, const RcConfig& config);

}  // namespace riskcal
