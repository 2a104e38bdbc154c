#pragma once

#include "riskcal/calibrate.hpp"
#include "riskcal/dataset.hpp"
#include "riskcal/naive_bayes.hpp"
#include "riskcal/statistics.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskcal {

enum class Method { ClosedForm, Rc, Gd, Dfe };

/// "closed-form", "rc", "gd", "dfe".
const char* to_string(Method method);
std::optional<Method> method_from_string(const std::string& name);

struct ExperimentConfig {
  std::string dataset;
  /// Label used in reports; the dataset file stem when empty.
  std::string name;
  ModelFamily family = ModelFamily::NaiveBayes;
  Estimator estimator = Estimator::ML;
  std::vector<Method> methods{Method::ClosedForm, Method::Rc, Method::Gd};
  double learning_rate = 0.1;
  int iterations = 64;
  int repetitions = 5;
  std::uint64_t seed = 0;
  double test_fraction = 0.25;
  /// k-means bins per continuous feature (naive Bayes only).
  int bins = 5;
  StopMode mode = StopMode::BestTracking;

  std::string display_name() const;
  /// Offending fields with a reason each; empty when valid.
  std::vector<std::string> problems() const;
};

/// Parses the JSON form. Missing keys keep their defaults; unknown keys, bad
/// types and invalid values are all reported in one ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

/// Outcome of one method in one repetition.
struct MethodRun {
  Method method = Method::ClosedForm;
  int repetition = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double train_soft_error = 0.0;
  /// Iteration of minimal training soft error; absent for closed-form.
  std::optional<int> best_iteration;
  /// RC only, and only when GD also ran.
  std::optional<int> reach;
  /// Training soft error per iteration, entry 0 being the initializer.
  std::vector<double> soft_trace;
};

struct MethodSummary {
  Method method = Method::ClosedForm;
  /// Percentages; std is the population standard deviation.
  double train_mean = 0.0;
  double train_std = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
  std::optional<double> iter_mean;
  /// Defined only when reach is defined in every repetition.
  std::optional<double> reach_mean;
};

struct ExperimentReport {
  std::string dataset;
  ModelFamily family = ModelFamily::NaiveBayes;
  Estimator estimator = Estimator::ML;
  std::vector<Method> methods;
  /// Grouped by method in config order, then by repetition.
  std::vector<MethodRun> runs;
  std::vector<MethodSummary> summaries;

  std::vector<const MethodRun*> runs_of(Method method) const;
};

/// First t >= 1 with rc_trace[t] <= min(gd_trace), where entry 0 of both
/// traces is the shared initializer.
std::optional<int> compute_reach(const std::vector<double>& rc_trace, const std::vector<double>& gd_trace);

/// Recomputes the per-method summaries from the runs.
std::vector<MethodSummary> summarize(const std::vector<Method>& methods, const std::vector<MethodRun>& runs);

/// Runs every repetition: split, discretize (naive Bayes), closed-form fit,
/// then each calibrator from that same initializer. `jobs` > 1 runs
/// repetitions concurrently without changing the result.
ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& data, int jobs = 1);
/// Loads `config.dataset` first.
ExperimentReport run_experiment(const ExperimentConfig& config, int jobs = 1);

enum class ReportFormat { Csv, Markdown };

std::string emit_report(const ExperimentReport& report, ReportFormat format);

}  // namespace riskcal
