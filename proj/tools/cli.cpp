#include "cli.hpp"

#include "riskcal/baselines.hpp"
#include "riskcal/calibrate.hpp"
#include "riskcal/errors.hpp"
#include "riskcal/evaluate.hpp"
#include "riskcal/format.hpp"
#include "riskcal/model.hpp"
#include "riskcal/preprocess.hpp"
#include "riskcal/serialize.hpp"
#include "riskcal/toy.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace riskcal::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// An output file could not be written. Treated as a usage error.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw OutputError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"config: cannot open " + path.string()});
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError({"config: " + std::string(e.what())});
  }
}

fs::path sibling(const fs::path& output, const std::string& suffix) {
  return output.parent_path() / (output.stem().string() + suffix);
}

std::string absolute_string(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

// Flags of one subcommand mirrored as JSON keys, so a resolved config can be
// written out and replayed through --config. Flags given on the command line
// win over the file.
class Bindings {
 public:
  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app.add_option("--" + key, target, help)->capture_default_str();
    entries_.push_back({key, opt, [&target] { return json(target); },
                        [&target](const json& j) { target = j.get<T>(); }});
    return opt;
  }

  void apply(const json& doc) const {
    if (!doc.is_object()) throw ConfigError({"config: expected a JSON object"});
    std::vector<std::string> problems;
    for (const auto& [key, value] : doc.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) {
        problems.push_back(key + ": unknown field");
        continue;
      }
      if (it->option->count() > 0) continue;
      try {
        it->set(value);
      } catch (const json::exception&) {
        problems.push_back(key + ": wrong type");
      }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }

  json resolved() const {
    json doc = json::object();
    for (const auto& e : entries_) doc[e.key] = e.get();
    return doc;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<json()> get;
    std::function<void(const json&)> set;
  };
  std::vector<Entry> entries_;
};

void require_choice(std::vector<std::string>& problems, const char* key, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  problems.push_back(std::string(key) + ": must be one of " + list + ", got '" + value + "'");
}

StopMode parse_mode(const std::string& s) { return s == "strict" ? StopMode::StrictStop : StopMode::BestTracking; }

// ---------------------------------------------------------------- toy

struct ToyOptions {
  double lr = 0.5;
  int iterations = 64;
  std::string mode = "best";
  std::string out = "toy_trace.csv";
};

int cmd_toy(ToyOptions o, std::ostream& out) {
  std::vector<std::string> problems;
  require_choice(problems, "mode", o.mode, {"strict", "best"});
  if (!(std::isfinite(o.lr) && o.lr >= 0)) problems.emplace_back("lr: must be finite and >= 0");
  if (o.iterations < 1) problems.emplace_back("iterations: must be >= 1");
  if (!problems.empty()) throw ConfigError(std::move(problems));

  RcConfig config{o.lr, o.iterations, parse_mode(o.mode), true};
  const ToyFamily family;
  const auto fit = rc_fit(toy_dataset(), family, config);
  const auto& tr = fit.trace;

  std::ostringstream csv;
  csv << "iteration,soft_error,error,s0_1,s1_1,s0_2,s1_2,mu_1,mu_2\n";
  std::vector<ToyParameters> params;
  for (std::size_t t = 0; t < tr.soft_error.size(); ++t) {
    params.push_back(family.parameters(tr.statistics[t]));
    const Eigen::VectorXd s = tr.statistics[t].flatten();
    csv << t << ',' << format_double(tr.soft_error[t]) << ',' << format_double(tr.error[t]);
    for (Eigen::Index k = 0; k < s.size(); ++k) csv << ',' << format_double(s(k));
    csv << ',' << format_double(params.back().means(0)) << ',' << format_double(params.back().means(1)) << '\n';
  }
  write_file(o.out, csv.str());

  out << "t    soft_error  error  mu\n";
  for (int t : {0, 1, 2, 4, 8, 16, 32, 64}) {
    if (t > tr.iterations_run()) break;
    const auto& p = params[static_cast<std::size_t>(t)];
    out << std::setw(2) << t << "   " << format_fixed(tr.soft_error[static_cast<std::size_t>(t)], 4) << "      "
        << format_fixed(tr.error[static_cast<std::size_t>(t)], 4) << " (" << format_fixed(p.means(0), 4) << ", "
        << format_fixed(p.means(1), 4) << ")\n";
  }
  out << "initial decision boundary x = " << format_fixed(toy_decision_boundary(params.front()), 4) << '\n';
  if (tr.iterations_run() >= 1) {
    const Eigen::VectorXd s = tr.statistics[1].flatten();
    out << "after iteration 1: statistics (";
    for (Eigen::Index k = 0; k < s.size(); ++k) out << (k ? ", " : "") << format_fixed(s(k), 4);
    out << "), mu = (" << format_fixed(params[1].means(0), 4) << ", " << format_fixed(params[1].means(1), 4)
        << ")\n";
  }
  out << "returned iteration " << tr.returned_iteration << ", mu = (" << format_fixed(fit.model.means(0), 4)
      << ", " << format_fixed(fit.model.means(1), 4) << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string data;
  std::string family = "nb";
  std::string estimator = "ml";
  std::string calibrator = "none";
  double lr = 0.1;
  int iterations = 64;
  std::string mode = "best";
  std::string model_out = "model.json";
  std::string trace_out;
};

template <typename Params>
void finish_fit(const FitResult<Params>& fit, const Dataset& data, const FitOptions& o, std::ostream& out) {
  const GenerativeModel model = fit.model;
  write_file(o.model_out, model_to_json(model, data.class_names()).dump(2) + "\n");
  std::ostringstream trace;
  write_trace_csv(fit.trace, trace);
  write_file(o.trace_out, trace.str());
  const auto losses = dataset_losses(model, data);
  out << "returned iteration " << fit.trace.returned_iteration << '\n'
      << "train error " << format_double(losses.error) << '\n'
      << "train soft error " << format_double(losses.soft_error) << '\n';
}

int cmd_fit(FitOptions o, std::ostream& out) {
  std::vector<std::string> problems;
  if (o.data.empty()) problems.emplace_back("data: path is required");
  require_choice(problems, "family", o.family, {"nb", "qda"});
  require_choice(problems, "estimator", o.estimator, {"ml", "map"});
  require_choice(problems, "calibrator", o.calibrator, {"none", "rc", "gd", "dfe"});
  require_choice(problems, "mode", o.mode, {"strict", "best"});
  if (!(std::isfinite(o.lr) && o.lr >= 0)) problems.emplace_back("lr: must be finite and >= 0");
  if (o.iterations < 1) problems.emplace_back("iterations: must be >= 1");
  if (o.calibrator == "dfe" && o.family == "qda") problems.emplace_back("calibrator: DFE supports NB only");
  if (!problems.empty()) throw ConfigError(std::move(problems));

  Dataset data = load_csv(o.data);
  const Estimator est = o.estimator == "ml" ? Estimator::ML : Estimator::MAP;
  RcConfig config{o.lr, o.iterations, parse_mode(o.mode), false};
  // The closed-form model is reported with the trace of its single entry.
  auto closed_form = [&](const auto& family) {
    using Params = typename std::decay_t<decltype(family)>::Params;
    FitResult<Params> fit{family.parameters(family.statistics(data)), family.statistics(data), {}};
    fit.trace.record(losses_from_posteriors(family.posteriors(fit.model, data), data.labels()));
    fit.trace.finalize_best();
    return fit;
  };

  if (o.family == "nb") {
    require_categorical(data, "nb (run `discretize` first)");
    const NaiveBayesFamily family{est};
    if (o.calibrator == "none") finish_fit(closed_form(family), data, o, out);
    else if (o.calibrator == "rc") finish_fit(rc_fit(data, family, config), data, o, out);
    else if (o.calibrator == "gd") finish_fit(gd_fit_nb(data, family.parameters(family.statistics(data)), config), data, o, out);
    else finish_fit(dfe_fit(data, family, config), data, o, out);
    return kExitOk;
  }

  data = data.with_features(data.features(),
                            Schema(static_cast<std::size_t>(data.feature_count()), FeatureSpec::continuous()));
  QdaFamily family{est, {}, kCovarianceFloor};
  if (est == Estimator::MAP) family.map_prior = default_map_prior(data);
  if (o.calibrator == "none") finish_fit(closed_form(family), data, o, out);
  else if (o.calibrator == "rc") finish_fit(rc_fit(data, family, config), data, o, out);
  else finish_fit(gd_fit_qda(data, family.parameters(family.statistics(data)), config), data, o, out);
  return kExitOk;
}

// ---------------------------------------------------------------- discretize

struct DiscretizeOptions {
  std::string data;
  int bins = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::string codec_out;
};

int cmd_discretize(const DiscretizeOptions& o, std::ostream& out) {
  std::vector<std::string> problems;
  if (o.data.empty()) problems.emplace_back("data: path is required");
  if (o.out.empty()) problems.emplace_back("out: path is required");
  if (o.bins < 2) problems.emplace_back("bins: must be >= 2");
  if (!problems.empty()) throw ConfigError(std::move(problems));

  std::vector<std::string> header;
  const Dataset data = load_csv(o.data, {}, &header);
  if (data.all_categorical()) throw SchemaError("discretize: input has no continuous features");
  const Discretizer disc = fit_discretizer(data, o.bins, o.seed);
  const Dataset coded = apply_discretizer(disc, data);

  std::ostringstream csv;
  write_csv(coded, csv, header);
  write_file(o.out, csv.str());
  write_file(o.codec_out, to_json(disc).dump(2) + "\n");
  for (std::size_t j = 0; j < disc.feature_count(); ++j) {
    const auto& c = disc.centroids[j];
    out << "feature " << j + 1 << ": " << (c ? std::to_string(c->size()) + " bins" : "categorical, unchanged")
        << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

int cmd_experiment(const std::string& config_path, const std::string& out_dir, int jobs, std::ostream& out) {
  if (config_path.empty()) throw ConfigError({"config: path is required"});
  if (jobs < 1) throw ConfigError({"jobs: must be >= 1"});
  ExperimentConfig config = experiment_config_from_json(read_json(config_path));
  // Relative dataset paths are taken relative to the config file.
  fs::path dataset(config.dataset);
  if (dataset.is_relative()) dataset = fs::absolute(fs::path(config_path).parent_path() / dataset);
  config.dataset = dataset.lexically_normal().string();

  const json resolved = to_json(config);
  out << resolved.dump(2) << '\n';

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw OutputError("cannot create " + out_dir + ": " + ec.message());
  const ExperimentReport report = run_experiment(config, jobs);
  const fs::path dir(out_dir);
  write_file(dir / "report.csv", emit_report(report, ReportFormat::Csv));
  write_file(dir / "report.md", emit_report(report, ReportFormat::Markdown));
  write_file(dir / "config.resolved.json", resolved.dump(2) + "\n");
  out << emit_report(report, ReportFormat::Markdown);
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-based calibration of generative classifiers", "riskcal"};
  app.require_subcommand(1);

  ToyOptions toy;
  Bindings toy_b;
  std::string toy_config;
  auto* toy_cmd = app.add_subcommand("toy", "RC on the three-point toy problem");
  toy_b.add(*toy_cmd, "lr", toy.lr, "learning rate");
  toy_b.add(*toy_cmd, "iterations", toy.iterations, "number of RC iterations");
  toy_b.add(*toy_cmd, "mode", toy.mode, "strict|best");
  toy_b.add(*toy_cmd, "out", toy.out, "trace CSV path");
  toy_cmd->add_option("--config", toy_config, "replay a resolved config JSON");

  FitOptions fit;
  Bindings fit_b;
  std::string fit_config;
  auto* fit_cmd = app.add_subcommand("fit", "train one model on a whole CSV file");
  fit_b.add(*fit_cmd, "data", fit.data, "input CSV");
  fit_b.add(*fit_cmd, "family", fit.family, "nb|qda");
  fit_b.add(*fit_cmd, "estimator", fit.estimator, "ml|map");
  fit_b.add(*fit_cmd, "calibrator", fit.calibrator, "none|rc|gd|dfe");
  fit_b.add(*fit_cmd, "lr", fit.lr, "learning rate (rc, gd)");
  fit_b.add(*fit_cmd, "iterations", fit.iterations, "iteration budget");
  fit_b.add(*fit_cmd, "mode", fit.mode, "strict|best");
  fit_b.add(*fit_cmd, "model-out", fit.model_out, "model JSON path");
  fit_b.add(*fit_cmd, "trace-out", fit.trace_out, "trace CSV path (default: next to the model)");
  fit_cmd->add_option("--config", fit_config, "replay a resolved config JSON");

  DiscretizeOptions disc;
  Bindings disc_b;
  std::string disc_config;
  auto* disc_cmd = app.add_subcommand("discretize", "k-means binning of continuous features");
  disc_b.add(*disc_cmd, "data", disc.data, "input CSV");
  disc_b.add(*disc_cmd, "bins", disc.bins, "bins per feature");
  disc_b.add(*disc_cmd, "seed", disc.seed, "k-means seed");
  disc_b.add(*disc_cmd, "out", disc.out, "discretized CSV path");
  disc_b.add(*disc_cmd, "codec-out", disc.codec_out, "centroid JSON path (default: next to --out)");
  disc_cmd->add_option("--config", disc_config, "replay a resolved config JSON");

  std::string exp_config;
  std::string exp_out = ".";
  int jobs = 1;
  auto* exp_cmd = app.add_subcommand("experiment", "repeated train/test protocol over a method matrix");
  exp_cmd->add_option("--config", exp_config, "experiment config JSON")->required();
  exp_cmd->add_option("--out-dir", exp_out, "directory for report.csv, report.md")->capture_default_str();
  exp_cmd->add_option("--jobs", jobs, "repetitions run in parallel")->capture_default_str();

  std::vector<const char*> argv{"riskcal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  // Resolve, echo, run, then save the resolved config beside the outputs.
  auto resolve = [&](const Bindings& b, const std::string& config) {
    if (!config.empty()) b.apply(read_json(config));
  };
  if (toy_cmd->parsed()) {
    resolve(toy_b, toy_config);
    toy.out = absolute_string(toy.out);
    const json resolved = toy_b.resolved();
    out << resolved.dump(2) << '\n';
    const int code = cmd_toy(toy, out);
    write_file(sibling(toy.out, ".resolved.json"), resolved.dump(2) + "\n");
    return code;
  }
  if (fit_cmd->parsed()) {
    resolve(fit_b, fit_config);
    fit.data = absolute_string(fit.data);
    fit.model_out = absolute_string(fit.model_out);
    fit.trace_out = fit.trace_out.empty() ? sibling(fit.model_out, ".trace.csv").string() : absolute_string(fit.trace_out);
    const json resolved = fit_b.resolved();
    out << resolved.dump(2) << '\n';
    const int code = cmd_fit(fit, out);
    write_file(sibling(fit.model_out, ".resolved.json"), resolved.dump(2) + "\n");
    return code;
  }
  if (disc_cmd->parsed()) {
    resolve(disc_b, disc_config);
    disc.data = absolute_string(disc.data);
    disc.out = absolute_string(disc.out);
    if (!disc.out.empty())
      disc.codec_out = disc.codec_out.empty() ? sibling(disc.out, ".codec.json").string() : absolute_string(disc.codec_out);
    const json resolved = disc_b.resolved();
    out << resolved.dump(2) << '\n';
    const int code = cmd_discretize(disc, out);
    write_file(sibling(disc.out, ".resolved.json"), resolved.dump(2) + "\n");
    return code;
  }
  return cmd_experiment(exp_config, exp_out, jobs, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const riskcal::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace riskcal::cli
