#include "riskcal/qda.hpp"

#include "riskcal/errors.hpp"

#include <cmath>

namespace riskcal {

QdaParameters::QdaParameters(Eigen::VectorXd class_prior, std::vector<Eigen::VectorXd> means,
                             std::vector<Eigen::MatrixXd> covariances)
    : class_prior_(std::move(class_prior)), means_(std::move(means)), covariances_(std::move(covariances)) {
  const auto r = static_cast<std::size_t>(class_prior_.size());
  if (r < 2 || means_.size() != r || covariances_.size() != r)
    throw std::invalid_argument("QDA parameters need matching prior, means and covariances");
  if ((class_prior_.array() < 0.0).any() || std::abs(class_prior_.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("QDA class prior is not a probability vector");
  const Eigen::Index n = means_.front().size();
  factors_.reserve(r);
  log_dets_.reserve(r);
  for (std::size_t y = 0; y < r; ++y) {
    if (means_[y].size() != n || covariances_[y].rows() != n || covariances_[y].cols() != n)
      throw std::invalid_argument("QDA class blocks have inconsistent dimensions");
    if (relative_asymmetry(covariances_[y]) > 1e-10)
      throw std::invalid_argument("QDA covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariances_[y]);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("QDA covariance is not positive definite");
    log_dets_.push_back(2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum());
    factors_.push_back(std::move(llt));
  }
}

QdaMapPrior default_map_prior(const Dataset& train, double mean_weight, double covariance_weight) {
  const auto& x = train.features();
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - mean.transpose();
  const Eigen::VectorXd var = centred.array().square().colwise().mean().transpose();
  return {mean, var.asDiagonal(), mean_weight, covariance_weight};
}

StatisticsVector qda_statistics(const Dataset& data) { return qda_statistics(data, data.one_hot_labels()); }

StatisticsVector qda_statistics(const Dataset& data, const Eigen::MatrixXd& weights) {
  require_continuous(data, "qda_statistics");
  if (weights.rows() != data.size() || weights.cols() != data.class_count())
    throw std::invalid_argument("qda_statistics: weight matrix has the wrong shape");
  const auto& x = data.features();
  const Eigen::Index n = x.cols();
  auto s = StatisticsVector::zeros(ModelFamily::Qda, data.class_count(), n, n);
  for (int y = 0; y < data.class_count(); ++y) {
    auto& block = s.block(y);
    const auto w = weights.col(y);
    block.count = w.sum();
    block.first.noalias() = x.transpose() * w;
    Eigen::MatrixXd second = x.transpose() * w.asDiagonal() * x;
    block.second = 0.5 * (second + second.transpose());
  }
  return s;
}

namespace {

struct SampleMoments {
  double mass;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // before repair
};

SampleMoments moments_of(const ClassBlock& block) {
  const double mass = std::max(block.count, kCountFloor);
  Eigen::VectorXd mean = block.first / mass;
  Eigen::MatrixXd cov = block.second / mass - mean * mean.transpose();
  return {mass, std::move(mean), 0.5 * (cov + cov.transpose())};
}

void check_qda_statistics(const StatisticsVector& s) {
  if (s.family() != ModelFamily::Qda) throw std::invalid_argument("QDA mapping needs QDA statistics");
  if (!s.flatten().allFinite()) throw DegenerateStatisticsError("statistics contain non-finite values");
}

}  // namespace

QdaParameters qda_ml_params(const StatisticsVector& s, double floor) {
  check_qda_statistics(s);
  const int r = s.class_count();
  Eigen::VectorXd counts(r);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int y = 0; y < r; ++y) {
    auto mom = moments_of(s.block(y));
    counts(y) = mom.mass;
    means.push_back(std::move(mom.mean));
    covs.push_back(psd_repair(mom.covariance, floor));
  }
  return QdaParameters(counts / counts.sum(), std::move(means), std::move(covs));
}

QdaParameters qda_map_params(const StatisticsVector& s, const QdaMapPrior& prior, double floor) {
  check_qda_statistics(s);
  if (prior.mean_weight < 0 || prior.covariance_weight < 0)
    throw std::invalid_argument("QDA MAP prior weights must be nonnegative");
  const int r = s.class_count();
  const Eigen::Index n = s.block(0).first.size();
  if (prior.mean.size() != n || prior.covariance.rows() != n || prior.covariance.cols() != n)
    throw std::invalid_argument("QDA MAP prior has the wrong dimension");

  Eigen::VectorXd counts(r);
  for (int y = 0; y < r; ++y) counts(y) = s.block(y).count + 1.0;
  const Eigen::VectorXd class_prior = clamp_normalize(counts, kCountFloor);

  const double m1 = prior.mean_weight;
  const double m2 = prior.covariance_weight;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int y = 0; y < r; ++y) {
    const auto mom = moments_of(s.block(y));
    const double m = mom.mass;
    means.push_back((m1 * prior.mean + m * mom.mean) / (m1 + m));
    Eigen::MatrixXd blended = (m2 * prior.covariance + m * mom.covariance) / (m2 + m);
    covs.push_back(psd_repair(0.5 * (blended + blended.transpose()), floor));
  }
  return QdaParameters(class_prior, std::move(means), std::move(covs));
}

void check_schema(const QdaParameters& params, const Dataset& data) {
  require_continuous(data, "QDA");
  if (data.feature_count() != params.dimension() || data.class_count() != params.class_count())
    throw SchemaError("dataset schema does not match the QDA model");
}

Eigen::MatrixXd qda_log_scores(const QdaParameters& params, const Dataset& data) {
  check_schema(params, data);
  const auto& x = data.features();
  Eigen::MatrixXd scores(data.size(), params.class_count());
  for (int y = 0; y < params.class_count(); ++y) {
    const Eigen::MatrixXd centred = (x.rowwise() - params.mean(y).transpose()).transpose();
    const Eigen::MatrixXd z = params.factor(y).matrixL().solve(centred);
    scores.col(y) = (std::log(params.class_prior()(y)) - 0.5 * params.log_det(y)) -
                    0.5 * z.colwise().squaredNorm().transpose().array();
  }
  return scores;
}

Eigen::MatrixXd qda_posteriors(const QdaParameters& params, const Dataset& data) {
  return softmax_rows(qda_log_scores(params, data));
}

ClassPosterior qda_posterior(const QdaParameters& params, const Eigen::RowVectorXd& x) {
  if (x.size() != params.dimension()) throw SchemaError("instance has the wrong dimension");
  Eigen::VectorXd scores(params.class_count());
  for (int y = 0; y < params.class_count(); ++y) {
    const Eigen::VectorXd z = params.factor(y).matrixL().solve((x.transpose() - params.mean(y)).eval());
    scores(y) = std::log(params.class_prior()(y)) - 0.5 * params.log_det(y) - 0.5 * z.squaredNorm();
  }
  return ClassPosterior::from_log_scores(scores);
}

}  // namespace riskcal
