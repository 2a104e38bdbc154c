#pragma once

#include "riskcal/dataset.hpp"
#include "riskcal/loss.hpp"
#include "riskcal/naive_bayes.hpp"
#include "riskcal/qda.hpp"
#include "riskcal/statistics.hpp"
#include "riskcal/toy.hpp"

#include <Eigen/Dense>

#include <concepts>
#include <variant>

namespace riskcal {

/// A closed-form learner split into a statistics mapping and a parameter
/// mapping, plus posterior inference for the parameters it produces.
template <typename F>
concept GenerativeFamily = requires(const F& family, const Dataset& data, const Eigen::MatrixXd& weights,
                                    const StatisticsVector& s, const typename F::Params& params) {
  { family.statistics(data) } -> std::same_as<StatisticsVector>;
  { family.statistics(data, weights) } -> std::same_as<StatisticsVector>;
  { family.parameters(s) } -> std::same_as<typename F::Params>;
  { family.posteriors(params, data) } -> std::same_as<Eigen::MatrixXd>;
};

struct NaiveBayesFamily {
  using Params = NbParameters;
  Estimator estimator = Estimator::ML;

  StatisticsVector statistics(const Dataset& d) const { return nb_statistics(d); }
  StatisticsVector statistics(const Dataset& d, const Eigen::MatrixXd& w) const { return nb_statistics(d, w); }
  Params parameters(const StatisticsVector& s) const { return nb_params(s, estimator); }
  Eigen::MatrixXd posteriors(const Params& p, const Dataset& d) const { return nb_posteriors(p, d); }
};

struct QdaFamily {
  using Params = QdaParameters;
  Estimator estimator = Estimator::ML;
  /// Only read when estimator is MAP.
  QdaMapPrior map_prior;
  double floor = kCovarianceFloor;

  StatisticsVector statistics(const Dataset& d) const { return qda_statistics(d); }
  StatisticsVector statistics(const Dataset& d, const Eigen::MatrixXd& w) const { return qda_statistics(d, w); }
  Params parameters(const StatisticsVector& s) const {
    return estimator == Estimator::ML ? qda_ml_params(s, floor) : qda_map_params(s, map_prior, floor);
  }
  Eigen::MatrixXd posteriors(const Params& p, const Dataset& d) const { return qda_posteriors(p, d); }
};

struct ToyFamily {
  using Params = ToyParameters;

  StatisticsVector statistics(const Dataset& d) const { return toy_statistics(d); }
  StatisticsVector statistics(const Dataset& d, const Eigen::MatrixXd& w) const { return toy_statistics(d, w); }
  Params parameters(const StatisticsVector& s) const { return toy_params(s); }
  Eigen::MatrixXd posteriors(const Params& p, const Dataset& d) const { return toy_posteriors(p, d); }
};

static_assert(GenerativeFamily<NaiveBayesFamily>);
static_assert(GenerativeFamily<QdaFamily>);
static_assert(GenerativeFamily<ToyFamily>);

/// Fitted parameters of any supported family.
using GenerativeModel = std::variant<NbParameters, QdaParameters, ToyParameters>;

ModelFamily family_of(const GenerativeModel& model);

/// m x r posterior matrix. Throws SchemaError on schema mismatch.
Eigen::MatrixXd posteriors(const GenerativeModel& model, const Dataset& data);

ClassPosterior posterior(const GenerativeModel& model, const Eigen::RowVectorXd& x);

/// Mean hard and soft 0-1 loss over the dataset.
LossSummary dataset_losses(const GenerativeModel& model, const Dataset& data);

}  // namespace riskcal
