#include "riskcal/naive_bayes.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/linalg.hpp"

#include <cmath>
#include <numeric>

namespace riskcal {

const char* to_string(Estimator estimator) { return estimator == Estimator::ML ? "ml" : "map"; }

std::vector<int> NbParameters::cardinalities() const {
  std::vector<int> out;
  out.reserve(cond_tables.size());
  for (const auto& t : cond_tables) out.push_back(static_cast<int>(t.cols()));
  return out;
}

namespace {

std::vector<int> schema_cardinalities(const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.schema().size());
  for (const auto& spec : data.schema()) out.push_back(spec.cardinality);
  return out;
}

std::vector<Eigen::Index> offsets_of(const std::vector<int>& cards) {
  std::vector<Eigen::Index> offsets(cards.size(), 0);
  for (std::size_t i = 1; i < cards.size(); ++i) offsets[i] = offsets[i - 1] + cards[i - 1];
  return offsets;
}

void check_finite(const StatisticsVector& s) {
  if (!s.flatten().allFinite()) throw DegenerateStatisticsError("statistics contain non-finite values");
}

// Shared body of the ML and MAP mappings: `pseudo` is added to every cell.
NbParameters map_counts(const StatisticsVector& s, double pseudo) {
  if (s.family() != ModelFamily::NaiveBayes)
    throw std::invalid_argument("naive Bayes mapping needs naive Bayes statistics");
  check_finite(s);
  const int r = s.class_count();
  const auto& cards = s.segments();
  const auto offsets = offsets_of(cards);

  NbParameters p;
  Eigen::VectorXd prior(r);
  for (int y = 0; y < r; ++y) prior(y) = s.block(y).count + pseudo;
  p.class_prior = clamp_normalize(prior, kCountFloor);

  p.cond_tables.reserve(cards.size());
  for (std::size_t i = 0; i < cards.size(); ++i) {
    Eigen::MatrixXd table(r, cards[i]);
    for (int y = 0; y < r; ++y) {
      Eigen::VectorXd cell = s.block(y).first.segment(offsets[i], cards[i]).array() + pseudo;
      table.row(y) = clamp_normalize(cell, kCountFloor).transpose();
    }
    p.cond_tables.push_back(std::move(table));
  }
  return p;
}

}  // namespace

StatisticsVector nb_statistics(const Dataset& data) { return nb_statistics(data, data.one_hot_labels()); }

StatisticsVector nb_statistics(const Dataset& data, const Eigen::MatrixXd& weights) {
  require_categorical(data, "nb_statistics");
  if (weights.rows() != data.size() || weights.cols() != data.class_count())
    throw std::invalid_argument("nb_statistics: weight matrix has the wrong shape");
  const auto cards = schema_cardinalities(data);
  const auto offsets = offsets_of(cards);
  const Eigen::Index width = std::accumulate(cards.begin(), cards.end(), Eigen::Index{0});
  auto s = StatisticsVector::zeros(ModelFamily::NaiveBayes, data.class_count(), width, 0, cards);

  const auto& x = data.features();
  for (int y = 0; y < data.class_count(); ++y) {
    auto& block = s.block(y);
    const auto w = weights.col(y);
    block.count = w.sum();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double wi = w(i);
      if (wi == 0.0) continue;
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        block.first(offsets[static_cast<std::size_t>(j)] + static_cast<Eigen::Index>(x(i, j)) - 1) += wi;
    }
  }
  return s;
}

NbParameters nb_ml_params(const StatisticsVector& s) { return map_counts(s, 0.0); }

NbParameters nb_map_params(const StatisticsVector& s) { return map_counts(s, 1.0); }

NbParameters nb_params(const StatisticsVector& s, Estimator estimator) {
  return estimator == Estimator::ML ? nb_ml_params(s) : nb_map_params(s);
}

void check_schema(const NbParameters& params, const Dataset& data) {
  require_categorical(data, "naive Bayes");
  if (schema_cardinalities(data) != params.cardinalities() ||
      data.class_count() != params.class_count())
    throw SchemaError("dataset schema does not match the naive Bayes model");
}

Eigen::MatrixXd nb_log_scores(const NbParameters& params, const Dataset& data) {
  check_schema(params, data);
  const int r = params.class_count();
  const auto& x = data.features();
  Eigen::MatrixXd scores = params.class_prior.array().log().matrix().transpose().replicate(data.size(), 1);
  for (std::size_t j = 0; j < params.cond_tables.size(); ++j) {
    const Eigen::MatrixXd log_table = params.cond_tables[j].array().log();
    const auto col = x.col(static_cast<Eigen::Index>(j));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const auto v = static_cast<Eigen::Index>(col(i)) - 1;
      for (int y = 0; y < r; ++y) scores(i, y) += log_table(y, v);
    }
  }
  return scores;
}

Eigen::MatrixXd nb_posteriors(const NbParameters& params, const Dataset& data) {
  return softmax_rows(nb_log_scores(params, data));
}

ClassPosterior nb_posterior(const NbParameters& params, const Eigen::RowVectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(params.cond_tables.size()))
    throw SchemaError("instance has the wrong number of features");
  Eigen::VectorXd scores = params.class_prior.array().log();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto& table = params.cond_tables[static_cast<std::size_t>(j)];
    const double v = x(j);
    if (v != std::round(v) || v < 1 || v > static_cast<double>(table.cols()))
      throw SchemaError("instance value outside the feature's categories");
    scores += table.col(static_cast<Eigen::Index>(v) - 1).array().log().matrix();
  }
  return ClassPosterior::from_log_scores(scores);
}

}  // namespace riskcal
