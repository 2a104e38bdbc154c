#pragma once
// Random problem generators and independent reference implementations used
// by both the unit tests and the acceptance runner. The oracles deliberately
// avoid the library's statistics and mapping code.

#include "riskcal/baselines.hpp"
#include "riskcal/dataset.hpp"
#include "riskcal/naive_bayes.hpp"
#include "riskcal/qda.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testing {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Labels covering every class: the first r instances take 0..r-1.
inline VectorXi covering_labels(std::mt19937_64& rng, Index m, int r) {
  VectorXi y(m);
  for (Index i = 0; i < m; ++i) y(i) = i < r ? static_cast<int>(i) : uniform_int(rng, 0, r - 1);
  return y;
}

inline riskcal::Dataset random_categorical(std::mt19937_64& rng, Index m, Index n, int r, int max_card) {
  riskcal::Schema schema;
  MatrixXd x(m, n);
  for (Index j = 0; j < n; ++j) {
    const int card = uniform_int(rng, 2, max_card);
    schema.push_back(riskcal::FeatureSpec::categorical(card));
    for (Index i = 0; i < m; ++i) x(i, j) = uniform_int(rng, 1, card);
  }
  return riskcal::Dataset(x, covering_labels(rng, m, r), schema, r);
}

/// Class-shifted Gaussian-ish clouds with a random linear mixing per class.
inline riskcal::Dataset random_continuous(std::mt19937_64& rng, Index m, Index n, int r) {
  std::normal_distribution<double> normal;
  const VectorXi y = covering_labels(rng, m, r);
  std::vector<MatrixXd> mix;
  std::vector<VectorXd> shift;
  for (int c = 0; c < r; ++c) {
    MatrixXd a(n, n);
    for (Index k = 0; k < a.size(); ++k) a(k) = normal(rng);
    mix.push_back(a);
    VectorXd s(n);
    for (Index k = 0; k < n; ++k) s(k) = 2.0 * normal(rng);
    shift.push_back(s);
  }
  MatrixXd x(m, n);
  for (Index i = 0; i < m; ++i) {
    VectorXd z(n);
    for (Index k = 0; k < n; ++k) z(k) = normal(rng);
    x.row(i) = (mix[static_cast<std::size_t>(y(i))] * z + shift[static_cast<std::size_t>(y(i))]).transpose();
  }
  return riskcal::Dataset(x, y, riskcal::Schema(static_cast<std::size_t>(n), riskcal::FeatureSpec::continuous()), r);
}

inline VectorXd random_simplex(std::mt19937_64& rng, Index k) {
  VectorXd p(k);
  for (Index i = 0; i < k; ++i) p(i) = uniform(rng, 0.05, 1.0);
  return p / p.sum();
}

inline riskcal::NbParameters random_nb_params(std::mt19937_64& rng, const riskcal::Dataset& data) {
  riskcal::NbParameters p;
  p.class_prior = random_simplex(rng, data.class_count());
  for (const auto& spec : data.schema()) {
    MatrixXd t(data.class_count(), spec.cardinality);
    for (int y = 0; y < data.class_count(); ++y) t.row(y) = random_simplex(rng, spec.cardinality).transpose();
    p.cond_tables.push_back(t);
  }
  return p;
}

inline riskcal::QdaParameters random_qda_params(std::mt19937_64& rng, Index n, int r) {
  std::normal_distribution<double> normal;
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covs;
  for (int y = 0; y < r; ++y) {
    VectorXd mu(n);
    MatrixXd a(n, n);
    for (Index k = 0; k < n; ++k) mu(k) = normal(rng);
    for (Index k = 0; k < a.size(); ++k) a(k) = normal(rng);
    means.push_back(mu);
    covs.push_back(a * a.transpose() + 0.5 * MatrixXd::Identity(n, n));
  }
  return riskcal::QdaParameters(random_simplex(rng, r), means, covs);
}

// ------------------------------------------------------------------ oracles

/// Direct frequency counting: p(y) and p(x_j = v | y) by nested loops, each
/// cell floored at 1e-6 before normalizing (the documented ML clamp).
inline riskcal::NbParameters frequency_oracle(const riskcal::Dataset& data) {
  const int r = data.class_count();
  riskcal::NbParameters p;
  std::vector<double> class_n(static_cast<std::size_t>(r), 0.0);
  for (Index i = 0; i < data.size(); ++i) class_n[static_cast<std::size_t>(data.label(i))] += 1.0;
  p.class_prior.resize(r);
  double total = 0.0;
  for (int y = 0; y < r; ++y) total += std::max(class_n[static_cast<std::size_t>(y)], 1e-6);
  for (int y = 0; y < r; ++y) p.class_prior(y) = std::max(class_n[static_cast<std::size_t>(y)], 1e-6) / total;
  for (Index j = 0; j < data.feature_count(); ++j) {
    const int card = data.schema()[static_cast<std::size_t>(j)].cardinality;
    MatrixXd t(r, card);
    for (int y = 0; y < r; ++y) {
      double row_total = 0.0;
      for (int v = 1; v <= card; ++v) {
        double c = 0.0;
        for (Index i = 0; i < data.size(); ++i)
          if (data.label(i) == y && data.features()(i, j) == v) c += 1.0;
        t(y, v - 1) = std::max(c, 1e-6);
        row_total += t(y, v - 1);
      }
      t.row(y) /= row_total;
    }
    p.cond_tables.push_back(t);
  }
  return p;
}

struct Moments {
  std::vector<double> prior;
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covariances;
};

/// Per-class sample mean, then a second pass for the biased covariance.
inline Moments two_pass_moments(const riskcal::Dataset& data) {
  const int r = data.class_count();
  const Index n = data.feature_count();
  Moments out;
  for (int y = 0; y < r; ++y) {
    VectorXd mean = VectorXd::Zero(n);
    double count = 0.0;
    for (Index i = 0; i < data.size(); ++i)
      if (data.label(i) == y) {
        mean += data.features().row(i).transpose();
        count += 1.0;
      }
    mean /= count;
    MatrixXd cov = MatrixXd::Zero(n, n);
    for (Index i = 0; i < data.size(); ++i)
      if (data.label(i) == y) {
        const VectorXd d = data.features().row(i).transpose() - mean;
        cov += d * d.transpose();
      }
    cov /= count;
    out.prior.push_back(count / static_cast<double>(data.size()));
    out.means.push_back(mean);
    out.covariances.push_back(cov);
  }
  return out;
}

/// Nearest simplex point by enumerating every support set and keeping the
/// one whose KKT conditions hold.
inline VectorXd simplex_kkt_oracle(const VectorXd& v) {
  const Index k = v.size();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (Index i = 0; i < k; ++i)
      if (mask & (1u << i)) {
        sum += v(i);
        ++size;
      }
    const double tau = (sum - 1.0) / size;
    bool ok = true;
    VectorXd p = VectorXd::Zero(k);
    for (Index i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        p(i) = v(i) - tau;
        ok &= p(i) >= -1e-15;
      } else {
        ok &= v(i) - tau <= 1e-15;
      }
    }
    if (ok) return p.cwiseMax(0.0);
  }
  return VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
}

/// Globally optimal 1-D k-means by trying every split of the sorted values
/// into k contiguous non-empty groups. Returns the sorted means.
inline std::vector<double> exhaustive_kmeans_1d(std::vector<double> values, int k) {
  std::sort(values.begin(), values.end());
  const int m = static_cast<int>(values.size());
  std::vector<double> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> cuts(static_cast<std::size_t>(k - 1));
  std::function<void(int, int)> rec = [&](int slot, int start) {
    if (slot == k - 1) {
      std::vector<double> means;
      double cost = 0.0;
      int lo = 0;
      for (int g = 0; g < k; ++g) {
        const int hi = g < k - 1 ? cuts[static_cast<std::size_t>(g)] : m;
        double s = 0.0;
        for (int i = lo; i < hi; ++i) s += values[static_cast<std::size_t>(i)];
        const double mu = s / (hi - lo);
        for (int i = lo; i < hi; ++i) cost += (values[static_cast<std::size_t>(i)] - mu) * (values[static_cast<std::size_t>(i)] - mu);
        means.push_back(mu);
        lo = hi;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = means;
      }
      return;
    }
    for (int c = start; c <= m - (k - 1 - slot); ++c) {
      cuts[static_cast<std::size_t>(slot)] = c;
      rec(slot + 1, c + 1);
    }
  };
  rec(0, 1);
  return best;
}

// ---------------------------------------------- finite-difference log loss

/// Average log loss of naive Bayes written directly in the natural
/// parameters: score_y(x) = eta0_y + sum_j eta_j[y, x_j].
inline double nb_natural_log_loss(const riskcal::NaturalParamsNb& eta, const riskcal::Dataset& data) {
  double total = 0.0;
  const int r = data.class_count();
  for (Index i = 0; i < data.size(); ++i) {
    VectorXd s = eta.eta0;
    for (std::size_t j = 0; j < eta.eta_tables.size(); ++j) {
      const auto v = static_cast<Index>(data.features()(i, static_cast<Index>(j))) - 1;
      for (int y = 0; y < r; ++y) s(y) += eta.eta_tables[j](y, v);
    }
    const double top = s.maxCoeff();
    total -= s(data.label(i)) - (top + std::log((s.array() - top).exp().sum()));
  }
  return total / static_cast<double>(data.size());
}

/// Same for QDA: log p(x, y) = eta0_y + eta1^T x + x^T eta2 x - A_y with
/// A_y = -1/4 eta1^T eta2^-1 eta1 - 1/2 log det(-2 eta2). eta2 is used as
/// given (no symmetrization) so single-entry perturbations are meaningful.
inline double qda_natural_log_loss(const riskcal::NaturalParamsQda& eta, const riskcal::Dataset& data) {
  const int r = data.class_count();
  std::vector<double> a(static_cast<std::size_t>(r));
  for (int y = 0; y < r; ++y) {
    const auto& e1 = eta.eta1[static_cast<std::size_t>(y)];
    const auto& e2 = eta.eta2[static_cast<std::size_t>(y)];
    const Eigen::PartialPivLU<MatrixXd> lu(e2);
    a[static_cast<std::size_t>(y)] =
        -0.25 * e1.dot(lu.solve(e1)) - 0.5 * std::log((-2.0 * e2).determinant());
  }
  double total = 0.0;
  for (Index i = 0; i < data.size(); ++i) {
    const VectorXd x = data.features().row(i).transpose();
    VectorXd s(r);
    for (int y = 0; y < r; ++y)
      s(y) = eta.eta0(y) + eta.eta1[static_cast<std::size_t>(y)].dot(x) +
             x.dot(eta.eta2[static_cast<std::size_t>(y)] * x) - a[static_cast<std::size_t>(y)];
    const double top = s.maxCoeff();
    total -= s(data.label(i)) - (top + std::log((s.array() - top).exp().sum()));
  }
  return total / static_cast<double>(data.size());
}

/// Central difference of `f` along every coordinate reachable through
/// `coords` (pointers into the parameter object `f` reads).
inline std::vector<double> central_differences(const std::vector<double*>& coords, const std::function<double()>& f,
                                               double step = 1e-5) {
  std::vector<double> g;
  for (double* c : coords) {
    const double saved = *c;
    *c = saved + step;
    const double up = f();
    *c = saved - step;
    const double down = f();
    *c = saved;
    g.push_back((up - down) / (2.0 * step));
  }
  return g;
}

inline std::vector<double*> coordinates(riskcal::NaturalParamsNb& eta) {
  std::vector<double*> out;
  for (Index k = 0; k < eta.eta0.size(); ++k) out.push_back(&eta.eta0(k));
  for (auto& t : eta.eta_tables)
    for (Index k = 0; k < t.size(); ++k) out.push_back(t.data() + k);
  return out;
}

inline std::vector<double*> coordinates(riskcal::NaturalParamsQda& eta) {
  std::vector<double*> out;
  for (Index k = 0; k < eta.eta0.size(); ++k) out.push_back(&eta.eta0(k));
  for (auto& v : eta.eta1)
    for (Index k = 0; k < v.size(); ++k) out.push_back(v.data() + k);
  for (auto& m : eta.eta2)
    for (Index k = 0; k < m.size(); ++k) out.push_back(m.data() + k);
  return out;
}

/// Worst coordinate-wise relative disagreement; each coordinate is scaled by
/// max(|fd|, 1e-3 * max|fd|) so exact zeros do not blow the ratio up.
inline double worst_relative(const std::vector<double>& analytic, const std::vector<double>& fd) {
  double scale_all = 0.0;
  for (double v : fd) scale_all = std::max(scale_all, std::abs(v));
  double worst = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) {
    const double scale = std::max({std::abs(fd[k]), 1e-3 * scale_all, 1e-12});
    worst = std::max(worst, std::abs(analytic[k] - fd[k]) / scale);
  }
  return worst;
}

inline double relative_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Max entry-wise relative difference with a floor on the scale.
inline double max_relative(const MatrixXd& a, const MatrixXd& b, double floor = 1e-12) {
  double worst = 0.0;
  for (Index k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a(k) - b(k)) / std::max({std::abs(a(k)), std::abs(b(k)), floor}));
  return worst;
}

}  // namespace testing
