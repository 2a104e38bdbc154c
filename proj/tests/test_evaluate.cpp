#include "helpers.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/evaluate.hpp"
#include "riskcal/preprocess.hpp"

#include <doctest.h>

using namespace riskcal;

namespace {

std::string iris() { return std::string(RISKCAL_DATA_DIR) + "/iris.csv"; }

ExperimentConfig small_config(ModelFamily family, std::vector<Method> methods) {
  ExperimentConfig c;
  c.dataset = iris();
  c.family = family;
  c.methods = std::move(methods);
  c.iterations = 10;
  c.repetitions = 3;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_SUITE("reach") {
  TEST_CASE("definition examples") {
    CHECK(compute_reach({0.3, 0.1}, {0.3, 0.2}) == 1);
    CHECK_FALSE(compute_reach({0.3, 0.25, 0.22}, {0.3, 0.2}).has_value());
    CHECK(compute_reach({0.3, 0.2, 0.1}, {0.3, 0.2}) == 1);
    CHECK_THROWS_AS(compute_reach({}, {0.1}), std::invalid_argument);
  }

  TEST_CASE("reach is the first qualifying iteration") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> rc, gd;
      for (int t = 0; t < 10; ++t) {
        rc.push_back(testing::uniform(rng, 0, 1));
        gd.push_back(testing::uniform(rng, 0, 1));
      }
      const double target = *std::min_element(gd.begin(), gd.end());
      const auto reach = compute_reach(rc, gd);
      if (!reach) continue;
      CHECK(rc[static_cast<std::size_t>(*reach)] <= target);
      for (int t = 1; t < *reach; ++t) CHECK(rc[static_cast<std::size_t>(t)] > target);
    }
  }
}

TEST_SUITE("experiment") {
  TEST_CASE("closed-form only") {
    const auto report = run_experiment(small_config(ModelFamily::NaiveBayes, {Method::ClosedForm}));
    CHECK(report.runs.size() == 3);
    for (const auto& r : report.runs) {
      CHECK_FALSE(r.best_iteration);
      CHECK_FALSE(r.reach);
    }
    REQUIRE(report.summaries.size() == 1);
    CHECK_FALSE(report.summaries[0].iter_mean);
    CHECK_FALSE(report.summaries[0].reach_mean);
  }

  TEST_CASE("all methods share the initializer and reports are deterministic") {
    const auto config = small_config(ModelFamily::NaiveBayes, {Method::ClosedForm, Method::Rc, Method::Gd, Method::Dfe});
    const auto a = run_experiment(config, 1);
    const auto b = run_experiment(config, 3);
    CHECK(emit_report(a, ReportFormat::Csv) == emit_report(b, ReportFormat::Csv));
    CHECK(emit_report(a, ReportFormat::Markdown) == emit_report(b, ReportFormat::Markdown));
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> starts;
      for (const auto& r : a.runs)
        if (r.repetition == rep) starts.push_back(r.soft_trace.front());
      for (double s : starts) CHECK(s == starts.front());
    }
    for (const auto& r : a.runs) {
      CHECK(r.train_error >= 0.0);
      CHECK(r.train_error <= 1.0);
      if (r.method == Method::Rc) CHECK(r.train_soft_error <= r.soft_trace.front());
    }
  }

  TEST_CASE("summaries agree with an independent pass") {
    const auto report = run_experiment(small_config(ModelFamily::Qda, {Method::ClosedForm, Method::Rc, Method::Gd}));
    for (const auto& s : report.summaries) {
      double sum = 0, sq = 0, n = 0;
      for (const auto* r : report.runs_of(s.method)) {
        sum += 100 * r->train_error;
        n += 1;
      }
      const double mean = sum / n;
      for (const auto* r : report.runs_of(s.method)) sq += (100 * r->train_error - mean) * (100 * r->train_error - mean);
      CHECK(std::abs(s.train_mean - mean) <= 1e-12 * std::max(1.0, mean));
      CHECK(std::abs(s.train_std - std::sqrt(sq / n)) <= 1e-12 * std::max(1.0, mean));
      CHECK(s.train_std >= 0.0);
    }
  }

  TEST_CASE("config parsing reports every offending field") {
    try {
      experiment_config_from_json(nlohmann::json{{"family", "qda"}, {"methods", {"dfe", "magic"}}, {"lr", "fast"},
                                                 {"bogus", 1}});
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      const auto& f = e.fields();
      auto has = [&](const std::string& prefix) {
        return std::any_of(f.begin(), f.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
      };
      CHECK(has("bogus"));
      CHECK(has("lr"));
      CHECK(has("dataset"));
      CHECK(has("methods: unknown"));
      CHECK(has("methods: DFE"));
    }
  }

  TEST_CASE("config JSON round trip") {
    auto c = small_config(ModelFamily::Qda, {Method::Rc});
    c.estimator = Estimator::MAP;
    c.mode = StopMode::StrictStop;
    const auto back = experiment_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
  }
}

TEST_SUITE("report") {
  TEST_CASE("empty method list gives a header-only CSV") {
    ExperimentReport report;
    report.dataset = "x";
    CHECK(emit_report(report, ReportFormat::Csv) ==
          "dataset,family,estimator,method,rep,train_error_pct,test_error_pct,best_iter,reach\n");
  }

  TEST_CASE("one method, five repetitions") {
    ExperimentReport report;
    report.dataset = "d";
    report.methods = {Method::Rc};
    for (int rep = 0; rep < 5; ++rep) {
      MethodRun r;
      r.method = Method::Rc;
      r.repetition = rep;
      r.train_error = 0.1;
      r.test_error = 0.2;
      r.best_iteration = rep;
      report.runs.push_back(r);
    }
    report.summaries = summarize(report.methods, report.runs);
    const std::string csv = emit_report(report, ReportFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(csv.find("d,nb,ml,rc,mean,10,20,2,-\n") != std::string::npos);
    CHECK(csv.find("d,nb,ml,rc,1,10,20,0,-\n") != std::string::npos);
    const std::string md = emit_report(report, ReportFormat::Markdown);
    CHECK(md.find("10 ± 00") != std::string::npos);
  }
}
