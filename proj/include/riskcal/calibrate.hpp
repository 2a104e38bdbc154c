#pragma once

#include "riskcal/errors.hpp"
#include "riskcal/model.hpp"
#include "riskcal/statistics.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace riskcal {

enum class StopMode {
  /// Stop as soon as the training soft error increases and return the model
  /// from the iteration before.
  StrictStop,
  /// Run every iteration and return the model with the lowest training soft
  /// error (earliest on ties).
  BestTracking,
};

const char* to_string(StopMode mode);

struct RcConfig {
  double learning_rate = 0.1;
  int max_iterations = 64;
  StopMode mode = StopMode::BestTracking;
  /// Keep a copy of the statistics of every iteration in the trace.
  bool record_statistics = false;

  /// Throws std::invalid_argument for a negative or non-finite learning rate
  /// or fewer than one iteration.
  void validate() const;
};

/// Per-iteration record of a calibration run. Entry t is the model after t
/// updates; entry 0 is the initial model.
struct RcTrace {
  std::vector<double> soft_error;
  std::vector<double> error;
  /// Sum of the class counts of the statistics behind each model. Empty for
  /// fitters that do not work on statistics.
  std::vector<double> sample_size;
  std::vector<StatisticsVector> statistics;
  int best_iteration = 0;
  int returned_iteration = 0;
  bool stopped_early = false;

  int iterations_run() const { return static_cast<int>(soft_error.size()) - 1; }
  void record(const LossSummary& losses);
  /// Recomputes best_iteration from soft_error.
  void finalize_best();
};

template <typename Params>
struct FitResult {
  Params model;
  /// Statistics that produced `model` (empty for fitters without statistics).
  StatisticsVector statistics;
  RcTrace trace;
};

/// s + lr * (s_xy - s_xh).
StatisticsVector rc_step(const StatisticsVector& s, const StatisticsVector& s_xy,
                         const StatisticsVector& s_xh, double learning_rate);

/// Index of the smallest entry, earliest on ties.
int argmin_earliest(const std::vector<double>& values);

/// Writes `iteration,soft_error,error` rows.
void write_trace_csv(const RcTrace& trace, std::ostream& out);

namespace detail {

/// Shared stop/selection rule of the iterative fitters. Callers record entry
/// t into trace() and then offer the model that produced it.
template <typename Params>
class Selection {
 public:
  Selection(StopMode mode, Params initial, StatisticsVector stats, RcTrace trace)
      : mode_(mode), current_{std::move(initial), std::move(stats), {}}, trace_(std::move(trace)) {
    if (mode_ == StopMode::BestTracking) best_.emplace(current_);
  }

  RcTrace& trace() { return trace_; }
  const Params& current() const { return current_.model; }

  /// Returns false when strict-stop rejects the model (soft error went up).
  bool offer(int t, Params model, StatisticsVector stats) {
    const auto& soft = trace_.soft_error;
    const double now = soft[static_cast<std::size_t>(t)];
    if (mode_ == StopMode::StrictStop && now > soft[static_cast<std::size_t>(t - 1)]) {
      trace_.stopped_early = true;
      return false;
    }
    current_.model = std::move(model);
    current_.statistics = std::move(stats);
    accepted_ = t;
    if (best_ && now < soft[static_cast<std::size_t>(best_iteration_)]) {
      best_->model = current_.model;
      best_->statistics = current_.statistics;
      best_iteration_ = t;
    }
    return true;
  }

  FitResult<Params> finish() {
    trace_.finalize_best();
    FitResult<Params> out = best_ ? std::move(*best_) : std::move(current_);
    trace_.returned_iteration = best_ ? best_iteration_ : accepted_;
    out.trace = std::move(trace_);
    return out;
  }

 private:
  StopMode mode_;
  FitResult<Params> current_;
  std::optional<FitResult<Params>> best_;
  RcTrace trace_;
  int accepted_ = 0;
  int best_iteration_ = 0;
};

}  // namespace detail

/// Risk-based calibration: starting from s(X, Y), repeatedly move the
/// statistics by lr * (s(X, Y) - s(X, h)) and re-map parameters.
template <GenerativeFamily Family>
FitResult<typename Family::Params> rc_fit(const Dataset& data, const Family& family, const RcConfig& config) {
  using Params = typename Family::Params;
  config.validate();

  // s(X, Y) never changes, so it is computed once.
  const StatisticsVector s_xy = family.statistics(data);

  auto map_params = [&](const StatisticsVector& stats, int t) -> Params {
    try {
      return family.parameters(stats);
    } catch (const DegenerateStatisticsError& e) {
      throw CalibrationError(t, e.what());
    }
  };
  auto record = [&](RcTrace& trace, const StatisticsVector& stats, const Eigen::MatrixXd& post) {
    trace.record(losses_from_posteriors(post, data.labels()));
    trace.sample_size.push_back(stats.sample_size());
    if (config.record_statistics) trace.statistics.push_back(stats);
  };

  StatisticsVector s = s_xy;
  Params initial = map_params(s, 0);
  Eigen::MatrixXd post = family.posteriors(initial, data);
  RcTrace trace;
  record(trace, s, post);
  detail::Selection<Params> selection(config.mode, std::move(initial), s, std::move(trace));

  for (int t = 1; t <= config.max_iterations; ++t) {
    const StatisticsVector s_xh = family.statistics(data, post);
    StatisticsVector next_s = rc_step(s, s_xy, s_xh, config.learning_rate);
    Params next = map_params(next_s, t);
    Eigen::MatrixXd next_post = family.posteriors(next, data);
    record(selection.trace(), next_s, next_post);
    if (!selection.offer(t, std::move(next), next_s)) break;
    s = std::move(next_s);
    post = std::move(next_post);
  }
  return selection.finish();
}

}  // namespace riskcal
