#include "riskcal/baselines.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/linalg.hpp"

#include <cmath>

namespace riskcal {

NaturalParamsNb to_natural(const NbParameters& params) {
  NaturalParamsNb eta;
  eta.eta0 = params.class_prior.array().log();
  for (const auto& t : params.cond_tables) eta.eta_tables.emplace_back(t.array().log());
  return eta;
}

NaturalParamsQda to_natural(const QdaParameters& params) {
  NaturalParamsQda eta;
  eta.eta0 = params.class_prior().array().log();
  const Eigen::Index n = params.dimension();
  for (int y = 0; y < params.class_count(); ++y) {
    const Eigen::MatrixXd precision = params.factor(y).solve(Eigen::MatrixXd::Identity(n, n));
    eta.eta1.push_back(precision * params.mean(y));
    eta.eta2.push_back(-0.5 * (0.5 * (precision + precision.transpose())));
  }
  return eta;
}

namespace {

Eigen::VectorXd simplex_from_log(const Eigen::VectorXd& log_probs) {
  return clamp_normalize(project_simplex(log_probs.array().exp().matrix()), kCountFloor);
}

}  // namespace

NbParameters project_natural(const NaturalParamsNb& eta) {
  NbParameters p;
  p.class_prior = simplex_from_log(eta.eta0);
  for (const auto& t : eta.eta_tables) {
    Eigen::MatrixXd table(t.rows(), t.cols());
    for (Eigen::Index y = 0; y < t.rows(); ++y)
      table.row(y) = simplex_from_log(t.row(y).transpose()).transpose();
    p.cond_tables.push_back(std::move(table));
  }
  return p;
}

QdaParameters project_natural(const NaturalParamsQda& eta, double floor) {
  const auto r = eta.eta0.size();
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (Eigen::Index y = 0; y < r; ++y) {
    const auto& e2 = eta.eta2[static_cast<std::size_t>(y)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (e2 + e2.transpose()));
    if (eig.info() != Eigen::Success) throw std::invalid_argument("eigensolver failed on eta2");
    // Sigma = -1/2 eta2^-1 along negative-definite directions; the rest is
    // left at zero variance for psd_repair to lift.
    Eigen::VectorXd variances = eig.eigenvalues().unaryExpr([](double l) { return l < 0.0 ? -0.5 / l : 0.0; });
    Eigen::MatrixXd raw = eig.eigenvectors() * variances.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::MatrixXd cov = psd_repair(0.5 * (raw + raw.transpose()), floor);
    means.push_back(cov * eta.eta1[static_cast<std::size_t>(y)]);
    covs.push_back(std::move(cov));
  }
  return QdaParameters(simplex_from_log(eta.eta0), std::move(means), std::move(covs));
}

NaturalParamsNb nb_log_loss_gradient(const NbParameters& params, const Dataset& data) {
  const Eigen::MatrixXd residual = nb_posteriors(params, data) - data.one_hot_labels();
  const double inv_m = 1.0 / static_cast<double>(data.size());
  NaturalParamsNb g;
  g.eta0 = residual.colwise().sum().transpose() * inv_m;
  const auto& x = data.features();
  for (std::size_t j = 0; j < params.cond_tables.size(); ++j) {
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(params.cond_tables[j].rows(), params.cond_tables[j].cols());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const auto v = static_cast<Eigen::Index>(x(i, static_cast<Eigen::Index>(j))) - 1;
      table.col(v) += residual.row(i).transpose();
    }
    g.eta_tables.push_back(table * inv_m);
  }
  return g;
}

NaturalParamsQda qda_log_loss_gradient(const QdaParameters& params, const Dataset& data) {
  const Eigen::MatrixXd residual = qda_posteriors(params, data) - data.one_hot_labels();
  const double inv_m = 1.0 / static_cast<double>(data.size());
  const auto& x = data.features();
  NaturalParamsQda g;
  g.eta0 = residual.colwise().sum().transpose() * inv_m;
  for (int y = 0; y < params.class_count(); ++y) {
    const auto d = residual.col(y);
    const double mass = d.sum();
    const auto& mu = params.mean(y);
    g.eta1.push_back((x.transpose() * d - mass * mu) * inv_m);
    Eigen::MatrixXd second = x.transpose() * d.asDiagonal() * x;
    second = 0.5 * (second + second.transpose());
    g.eta2.push_back((second - mass * (mu * mu.transpose() + params.covariance(y))) * inv_m);
  }
  return g;
}

double average_log_loss(const Eigen::MatrixXd& posteriors, const Eigen::VectorXi& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) total -= std::log(posteriors(i, labels(i)));
  return total / static_cast<double>(labels.size());
}

namespace {

// Runs `config.max_iterations` steps of `advance`, recording the training
// losses of each model and applying the configured stop rule.
template <typename Params, typename Advance, typename Posteriors>
FitResult<Params> descend(const Dataset& data, Params init, const RcConfig& config, Advance advance,
                          Posteriors posteriors_of) {
  config.validate();
  RcTrace trace;
  trace.record(losses_from_posteriors(posteriors_of(init), data.labels()));
  detail::Selection<Params> selection(config.mode, init, {}, std::move(trace));
  for (int t = 1; t <= config.max_iterations; ++t) {
    Params next = [&] {
      try {
        return advance(selection.current());
      } catch (const std::invalid_argument& e) {
        throw CalibrationError(t, e.what());
      }
    }();
    selection.trace().record(losses_from_posteriors(posteriors_of(next), data.labels()));
    if (!selection.offer(t, std::move(next), {})) break;
  }
  return selection.finish();
}

}  // namespace

FitResult<NbParameters> gd_fit_nb(const Dataset& data, const NbParameters& init, const RcConfig& config) {
  check_schema(init, data);
  const double lr = config.learning_rate;
  return descend<NbParameters>(
      data, init, config,
      [&](const NbParameters& p) {
        const auto g = nb_log_loss_gradient(p, data);
        auto eta = to_natural(p);
        eta.eta0 -= lr * g.eta0;
        for (std::size_t j = 0; j < eta.eta_tables.size(); ++j) eta.eta_tables[j] -= lr * g.eta_tables[j];
        return project_natural(eta);
      },
      [&](const NbParameters& p) { return nb_posteriors(p, data); });
}

FitResult<QdaParameters> gd_fit_qda(const Dataset& data, const QdaParameters& init, const RcConfig& config,
                                    double floor) {
  check_schema(init, data);
  const double lr = config.learning_rate;
  return descend<QdaParameters>(
      data, init, config,
      [&](const QdaParameters& p) {
        const auto g = qda_log_loss_gradient(p, data);
        auto eta = to_natural(p);
        eta.eta0 -= lr * g.eta0;
        for (std::size_t y = 0; y < eta.eta1.size(); ++y) {
          eta.eta1[y] -= lr * g.eta1[y];
          eta.eta2[y] -= lr * g.eta2[y];
          eta.eta2[y] = (0.5 * (eta.eta2[y] + eta.eta2[y].transpose())).eval();
        }
        return project_natural(eta, floor);
      },
      [&](const QdaParameters& p) { return qda_posteriors(p, data); });
}

FitResult<NbParameters> dfe_fit(const Dataset& data, const NaiveBayesFamily& family, const RcConfig& config) {
  config.validate();
  if (!data.all_categorical()) throw SchemaError("DFE supports NB only");

  StatisticsVector s = family.statistics(data);
  NbParameters current = family.parameters(s);
  Eigen::MatrixXd post = family.posteriors(current, data);

  RcTrace trace;
  auto record = [&](RcTrace& tr, const StatisticsVector& stats, const Eigen::MatrixXd& p) {
    tr.record(losses_from_posteriors(p, data.labels()));
    tr.sample_size.push_back(stats.sample_size());
    if (config.record_statistics) tr.statistics.push_back(stats);
  };
  record(trace, s, post);
  detail::Selection<NbParameters> selection(config.mode, current, s, std::move(trace));

  const Eigen::MatrixXd one_hot = data.one_hot_labels();
  for (int t = 1; t <= config.max_iterations; ++t) {
    // Only the true-class block of each instance moves, by its soft loss.
    Eigen::MatrixXd weights = one_hot;
    for (Eigen::Index i = 0; i < data.size(); ++i) weights(i, data.label(i)) = 1.0 - post(i, data.label(i));
    StatisticsVector next_s = stats_add_scaled(s, family.statistics(data, weights), 1.0);
    NbParameters next = [&] {
      try {
        return family.parameters(next_s);
      } catch (const DegenerateStatisticsError& e) {
        throw CalibrationError(t, e.what());
      }
    }();
    Eigen::MatrixXd next_post = family.posteriors(next, data);
    record(selection.trace(), next_s, next_post);
    if (!selection.offer(t, std::move(next), next_s)) break;
    s = std::move(next_s);
    post = std::move(next_post);
  }
  return selection.finish();
}

}  // namespace riskcal
