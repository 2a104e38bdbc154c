#include "riskcal/evaluate.hpp"

#include "riskcal/baselines.hpp"
#include "riskcal/errors.hpp"
#include "riskcal/format.hpp"
#include "riskcal/model.hpp"
#include "riskcal/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace riskcal {

const char* to_string(Method method) {
  switch (method) {
    case Method::ClosedForm: return "closed-form";
    case Method::Rc: return "rc";
    case Method::Gd: return "gd";
    case Method::Dfe: return "dfe";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& name) {
  for (auto m : {Method::ClosedForm, Method::Rc, Method::Gd, Method::Dfe})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::string ExperimentConfig::display_name() const {
  return name.empty() ? std::filesystem::path(dataset).stem().string() : name;
}

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> out;
  if (dataset.empty()) out.emplace_back("dataset: path is required");
  if (family == ModelFamily::Toy) out.emplace_back("family: must be nb or qda");
  if (!(std::isfinite(learning_rate) && learning_rate >= 0.0)) out.emplace_back("lr: must be finite and >= 0");
  if (iterations < 1) out.emplace_back("iterations: must be >= 1");
  if (repetitions < 1) out.emplace_back("repetitions: must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) out.emplace_back("test_fraction: must lie in (0, 1)");
  if (bins < 2) out.emplace_back("bins: must be >= 2");
  std::set<Method> seen;
  for (auto m : methods) {
    if (!seen.insert(m).second) out.emplace_back(std::string("methods: '") + to_string(m) + "' listed twice");
    if (m == Method::Dfe && family != ModelFamily::NaiveBayes) out.emplace_back("methods: DFE supports NB only");
  }
  return out;
}

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& doc, const char* key, T& target, std::vector<std::string>& problems) {
  if (!doc.contains(key)) return;
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(std::string(key) + ": wrong type");
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  static const std::set<std::string> known{"dataset", "name", "family", "estimator", "methods", "lr",
                                           "iterations", "repetitions", "seed", "test_fraction", "bins", "mode"};
  ExperimentConfig c;
  std::vector<std::string> problems;
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) problems.push_back(key + ": unknown field");

  read_field(doc, "dataset", c.dataset, problems);
  read_field(doc, "name", c.name, problems);
  read_field(doc, "lr", c.learning_rate, problems);
  read_field(doc, "iterations", c.iterations, problems);
  read_field(doc, "repetitions", c.repetitions, problems);
  read_field(doc, "seed", c.seed, problems);
  read_field(doc, "test_fraction", c.test_fraction, problems);
  read_field(doc, "bins", c.bins, problems);

  std::string family = to_string(c.family);
  read_field(doc, "family", family, problems);
  if (family == "nb") c.family = ModelFamily::NaiveBayes;
  else if (family == "qda") c.family = ModelFamily::Qda;
  else problems.push_back("family: must be nb or qda, got '" + family + "'");

  std::string estimator = to_string(c.estimator);
  read_field(doc, "estimator", estimator, problems);
  if (estimator == "ml") c.estimator = Estimator::ML;
  else if (estimator == "map") c.estimator = Estimator::MAP;
  else problems.push_back("estimator: must be ml or map, got '" + estimator + "'");

  std::string mode = to_string(c.mode);
  read_field(doc, "mode", mode, problems);
  if (mode == "strict") c.mode = StopMode::StrictStop;
  else if (mode == "best") c.mode = StopMode::BestTracking;
  else problems.push_back("mode: must be strict or best, got '" + mode + "'");

  if (doc.contains("methods")) {
    std::vector<std::string> names;
    read_field(doc, "methods", names, problems);
    c.methods.clear();
    for (const auto& n : names) {
      if (auto m = method_from_string(n)) c.methods.push_back(*m);
      else problems.push_back("methods: unknown method '" + n + "'");
    }
  }

  for (auto& p : c.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

json to_json(const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.emplace_back(to_string(m));
  return {{"dataset", c.dataset},         {"name", c.name},
          {"family", to_string(c.family)}, {"estimator", to_string(c.estimator)},
          {"methods", methods},           {"lr", c.learning_rate},
          {"iterations", c.iterations},   {"repetitions", c.repetitions},
          {"seed", c.seed},               {"test_fraction", c.test_fraction},
          {"bins", c.bins},               {"mode", to_string(c.mode)}};
}

std::vector<const MethodRun*> ExperimentReport::runs_of(Method method) const {
  std::vector<const MethodRun*> out;
  for (const auto& r : runs)
    if (r.method == method) out.push_back(&r);
  return out;
}

std::optional<int> compute_reach(const std::vector<double>& rc_trace, const std::vector<double>& gd_trace) {
  if (rc_trace.empty() || gd_trace.empty()) throw std::invalid_argument("compute_reach: empty trace");
  const double target = *std::min_element(gd_trace.begin(), gd_trace.end());
  for (std::size_t t = 1; t < rc_trace.size(); ++t)
    if (rc_trace[t] <= target) return static_cast<int>(t);
  return std::nullopt;
}

namespace {

struct MeanStd {
  double mean;
  double std;
};

MeanStd mean_std(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

}  // namespace

std::vector<MethodSummary> summarize(const std::vector<Method>& methods, const std::vector<MethodRun>& runs) {
  std::vector<MethodSummary> out;
  for (auto method : methods) {
    std::vector<double> train, test, iters, reaches;
    bool reach_everywhere = true;
    bool has_reach_column = false;
    for (const auto& r : runs) {
      if (r.method != method) continue;
      train.push_back(100.0 * r.train_error);
      test.push_back(100.0 * r.test_error);
      if (r.best_iteration) iters.push_back(*r.best_iteration);
      if (r.reach) reaches.push_back(*r.reach);
      else reach_everywhere = false;
      has_reach_column = true;
    }
    MethodSummary s;
    s.method = method;
    if (train.empty()) {
      out.push_back(s);
      continue;
    }
    const auto tr = mean_std(train);
    const auto te = mean_std(test);
    s.train_mean = tr.mean;
    s.train_std = tr.std;
    s.test_mean = te.mean;
    s.test_std = te.std;
    if (!iters.empty()) s.iter_mean = mean_std(iters).mean;
    if (has_reach_column && reach_everywhere) s.reach_mean = mean_std(reaches).mean;
    out.push_back(s);
  }
  return out;
}

namespace {

// Only the RC run carries a reach, and only when GD ran too.
void attach_reach(std::vector<MethodRun>& runs) {
  const MethodRun* gd = nullptr;
  for (const auto& r : runs)
    if (r.method == Method::Gd) gd = &r;
  if (!gd) return;
  for (auto& r : runs)
    if (r.method == Method::Rc) r.reach = compute_reach(r.soft_trace, gd->soft_trace);
}

template <typename Params>
MethodRun make_run(Method method, int rep, const Params& model, const Dataset& train, const Dataset& test,
                   const RcTrace* trace) {
  MethodRun run;
  run.method = method;
  run.repetition = rep;
  const GenerativeModel m = model;
  const auto tr = dataset_losses(m, train);
  run.train_error = tr.error;
  run.train_soft_error = tr.soft_error;
  run.test_error = dataset_losses(m, test).error;
  if (trace) {
    run.best_iteration = trace->best_iteration;
    run.soft_trace = trace->soft_error;
  } else {
    run.soft_trace = {tr.soft_error};
  }
  return run;
}

template <typename Family, typename Gd>
std::vector<MethodRun> run_methods(const ExperimentConfig& config, int rep, const Dataset& train,
                                   const Dataset& test, const Family& family, Gd gd_fit) {
  RcConfig rc;
  rc.learning_rate = config.learning_rate;
  rc.max_iterations = config.iterations;
  rc.mode = config.mode;

  const auto init = family.parameters(family.statistics(train));
  std::vector<MethodRun> runs;
  for (auto method : config.methods) {
    try {
      switch (method) {
        case Method::ClosedForm:
          runs.push_back(make_run(method, rep, init, train, test, nullptr));
          break;
        case Method::Rc: {
          const auto fit = rc_fit(train, family, rc);
          runs.push_back(make_run(method, rep, fit.model, train, test, &fit.trace));
          break;
        }
        case Method::Gd: {
          const auto fit = gd_fit(train, init, rc);
          runs.push_back(make_run(method, rep, fit.model, train, test, &fit.trace));
          break;
        }
        case Method::Dfe:
          if constexpr (std::is_same_v<Family, NaiveBayesFamily>) {
            const auto fit = dfe_fit(train, family, rc);
            runs.push_back(make_run(method, rep, fit.model, train, test, &fit.trace));
          } else {
            throw SchemaError("DFE supports NB only");
          }
          break;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("method ") + to_string(method) + ", repetition " +
                               std::to_string(rep + 1) + ": " + e.what());
    }
  }
  attach_reach(runs);
  return runs;
}

std::vector<MethodRun> run_repetition(const ExperimentConfig& config, const Dataset& data, int rep) {
  const Split parts = [&] {
    try {
      return split(data, SplitSpec{config.test_fraction, config.seed, rep});
    } catch (const std::exception& e) {
      throw std::runtime_error("split, repetition " + std::to_string(rep + 1) + ": " + e.what());
    }
  }();

  if (config.family == ModelFamily::NaiveBayes) {
    Dataset train = parts.train;
    Dataset test = parts.test;
    if (!data.all_categorical()) {
      // Fit on the training part only; the stream is distinct from the split's.
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(rep), 0xd15cu};
      std::mt19937_64 rng(seq);
      const auto disc = fit_discretizer(parts.train, config.bins, rng());
      train = apply_discretizer(disc, parts.train);
      test = apply_discretizer(disc, parts.test);
    }
    return run_methods(config, rep, train, test, NaiveBayesFamily{config.estimator},
                       [](const Dataset& d, const NbParameters& p, const RcConfig& c) { return gd_fit_nb(d, p, c); });
  }

  QdaFamily family{config.estimator, {}, kCovarianceFloor};
  if (config.estimator == Estimator::MAP) family.map_prior = default_map_prior(parts.train);
  return run_methods(config, rep, parts.train, parts.test, family,
                     [](const Dataset& d, const QdaParameters& p, const RcConfig& c) { return gd_fit_qda(d, p, c); });
}

Dataset as_continuous(const Dataset& data) {
  if (data.all_continuous()) return data;
  return data.with_features(data.features(), Schema(static_cast<std::size_t>(data.feature_count()),
                                                    FeatureSpec::continuous()));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& input, int jobs) {
  if (auto problems = config.problems(); !problems.empty()) throw ConfigError(std::move(problems));
  const Dataset data = config.family == ModelFamily::Qda ? as_continuous(input) : input;

  std::vector<std::vector<MethodRun>> per_rep(static_cast<std::size_t>(config.repetitions));
  std::vector<std::exception_ptr> failures(per_rep.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int rep = next++; rep < config.repetitions; rep = next++) {
      try {
        per_rep[static_cast<std::size_t>(rep)] = run_repetition(config, data, rep);
      } catch (...) {
        failures[static_cast<std::size_t>(rep)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, config.repetitions);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  ExperimentReport report;
  report.dataset = config.display_name();
  report.family = config.family;
  report.estimator = config.estimator;
  report.methods = config.methods;
  for (auto method : config.methods)
    for (const auto& rep_runs : per_rep)
      for (const auto& r : rep_runs)
        if (r.method == method) report.runs.push_back(r);
  report.summaries = summarize(report.methods, report.runs);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, int jobs) {
  if (auto problems = config.problems(); !problems.empty()) throw ConfigError(std::move(problems));
  return run_experiment(config, load_csv(config.dataset), jobs);
}

namespace {

std::string estimator_label(Estimator e) { return e == Estimator::ML ? "ML" : "MAP"; }

std::string method_label(Method m, Estimator e) {
  switch (m) {
    case Method::ClosedForm: return estimator_label(e);
    case Method::Rc: return "RC";
    case Method::Gd: return "GD";
    case Method::Dfe: return "DFE";
  }
  return "?";
}

// "04 ± 01": rounded percentages, zero-padded to two digits.
std::string pct_cell(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%02.0f ± %02.0f", mean, std);
  return buf;
}

std::string iter_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04.1f", v);
  return buf;
}

std::string emit_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "dataset,family,estimator,method,rep,train_error_pct,test_error_pct,best_iter,reach\n";
  const std::string prefix =
      report.dataset + "," + to_string(report.family) + "," + to_string(report.estimator) + ",";
  for (const auto& summary : report.summaries) {
    const auto runs = report.runs_of(summary.method);
    for (const auto* r : runs) {
      out << prefix << to_string(r->method) << ',' << r->repetition + 1 << ','
          << format_double(100.0 * r->train_error) << ',' << format_double(100.0 * r->test_error) << ','
          << (r->best_iteration ? std::to_string(*r->best_iteration) : "-") << ','
          << (r->reach ? std::to_string(*r->reach) : "-") << '\n';
    }
    if (runs.empty()) continue;
    out << prefix << to_string(summary.method) << ",mean," << format_double(summary.train_mean) << ','
        << format_double(summary.test_mean) << ','
        << (summary.iter_mean ? format_double(*summary.iter_mean) : "-") << ','
        << (summary.reach_mean ? format_double(*summary.reach_mean) : "-") << '\n';
  }
  return out.str();
}

std::string emit_markdown(const ExperimentReport& report) {
  std::vector<std::string> groups{"Dataset"};
  std::vector<std::string> columns{""};
  std::vector<std::string> cells{report.dataset};
  for (const auto& s : report.summaries) {
    const std::string label = method_label(s.method, report.estimator);
    const bool has_runs = !report.runs_of(s.method).empty();
    groups.push_back(label);
    columns.emplace_back("Training (%)");
    cells.push_back(has_runs ? pct_cell(s.train_mean, s.train_std) : "-");
    groups.emplace_back("");
    columns.emplace_back("Test (%)");
    cells.push_back(has_runs ? pct_cell(s.test_mean, s.test_std) : "-");
    if (s.method != Method::ClosedForm) {
      groups.emplace_back("");
      columns.emplace_back("Iter");
      cells.push_back(s.iter_mean ? iter_cell(*s.iter_mean) : "-");
    }
  }
  const bool reach_column = std::any_of(report.methods.begin(), report.methods.end(),
                                        [](Method m) { return m == Method::Rc; }) &&
                            std::any_of(report.methods.begin(), report.methods.end(),
                                        [](Method m) { return m == Method::Gd; });
  if (reach_column) {
    groups.emplace_back("");
    columns.emplace_back("Reach");
    std::string reach = "-";
    for (const auto& s : report.summaries)
      if (s.method == Method::Rc && s.reach_mean) reach = iter_cell(*s.reach_mean);
    cells.push_back(reach);
  }

  std::ostringstream out;
  out << "Family: " << to_string(report.family) << ", estimator: " << estimator_label(report.estimator)
      << ", repetitions: " << (report.summaries.empty() ? 0 : report.runs_of(report.summaries[0].method).size())
      << "\n\n";
  auto row = [&](const std::vector<std::string>& v) {
    out << '|';
    for (const auto& c : v) out << ' ' << c << " |";
    out << '\n';
  };
  row(groups);
  out << '|';
  for (std::size_t k = 0; k < groups.size(); ++k) out << (k == 0 ? " --- |" : " :---: |");
  out << '\n';
  row(columns);
  row(cells);
  return out.str();
}

}  // namespace

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  return format == ReportFormat::Csv ? emit_csv(report) : emit_markdown(report);
}

}  // namespace riskcal
