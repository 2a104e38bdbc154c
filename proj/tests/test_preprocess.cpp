#include "helpers.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/preprocess.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace riskcal;
using Eigen::MatrixXd;

namespace {

Dataset parse(const std::string& text, CsvOptions options = {}) {
  std::istringstream in(text);
  return read_csv(in, options);
}

Dataset column(const std::vector<double>& values) {
  MatrixXd x(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::VectorXi y(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = values[i];
    y(static_cast<Eigen::Index>(i)) = static_cast<int>(i % 2);
  }
  return Dataset(x, y, {FeatureSpec::continuous()}, 2);
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("toy file") {
    const Dataset d = load_csv(std::string(RISKCAL_DATA_DIR) + "/toy.csv");
    CHECK(d.size() == 3);
    CHECK(d.features()(0, 0) == 0.0);
    CHECK(d.features()(1, 0) == 1.0);
    CHECK(d.features()(2, 0) == 4.0);
    CHECK(d.label(0) == 0);
    CHECK(d.label(1) == 1);
    CHECK(d.label(2) == 1);
    CHECK(d.class_names() == std::vector<std::string>{"1", "2"});
    CHECK_FALSE(d.schema()[0].is_categorical());
  }

  TEST_CASE("header handling") {
    CsvOptions with_header;
    with_header.header = HeaderMode::Present;
    std::vector<std::string> header;
    std::istringstream in("a,b\n1,x\n2,y\n");
    const Dataset d = read_csv(in, with_header, &header);
    CHECK(d.size() == 2);
    CHECK(header == std::vector<std::string>{"a", "b"});
    CHECK(parse("f,label\n0.5,a\n1.5,b\n").size() == 2);
  }

  TEST_CASE("errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse("1,a\n2,a\n"), "single-class dataset", riskcal::ParseError);
    try {
      parse("1,a\n2,b\n3\n");
      FAIL("expected a parse error");
    } catch (const riskcal::ParseError& e) {
      CHECK(e.line() == 3);
    }
    try {
      parse("1,a\nzz,b\n");
      FAIL("expected a parse error");
    } catch (const riskcal::ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("schema inference and hints") {
    const Dataset d = parse("1,0.5,a\n3,1.5,b\n2,2.5,a\n");
    CHECK(d.schema()[0] == FeatureSpec::categorical(3));
    CHECK_FALSE(d.schema()[1].is_categorical());
    CsvOptions cont;
    cont.kinds = KindHint::AllContinuous;
    CHECK(parse("1,0.5,a\n3,1.5,b\n", cont).all_continuous());
    CsvOptions cat;
    cat.kinds = KindHint::AllCategorical;
    CHECK_THROWS_AS(parse("1,0.5,a\n3,1.5,b\n", cat), riskcal::ParseError);
  }

  TEST_CASE("round trip keeps 15 significant digits") {
    std::mt19937_64 rng(71);
    const Dataset d = testing::random_continuous(rng, 20, 3, 3);
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    CsvOptions cont;
    cont.kinds = KindHint::AllContinuous;
    const Dataset back = read_csv(in, cont);
    CHECK(testing::max_relative(back.features(), d.features(), 1e-300) < 1e-15);
    CHECK(back.labels() == d.labels());
  }
}

TEST_SUITE("discretizer") {
  TEST_CASE("few distinct values become the centroids") {
    const auto c = kmeans_1d({3, 1, 2, 5, 4, 1, 2, 3, 4, 5}, 5, 0);
    CHECK(c == std::vector<double>{1, 2, 3, 4, 5});
    const Discretizer d = fit_discretizer(column({7, 7, 7, 7}), 5, 0);
    REQUIRE(d.centroids[0]);
    CHECK(d.centroids[0]->size() == 1);
    const Dataset coded = apply_discretizer(d, column({7, 7, 7, 7}));
    CHECK(coded.schema()[0] == FeatureSpec::categorical(1));
    CHECK((coded.features().array() == 1.0).all());
  }

  TEST_CASE("two clusters match the exhaustive oracle") {
    const std::vector<double> v{0, 1, 10, 11};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto c = kmeans_1d(v, 2, seed);
      CHECK(c == std::vector<double>{0.5, 10.5});
    }
    CHECK(testing::exhaustive_kmeans_1d(v, 2) == std::vector<double>{0.5, 10.5});
  }

  TEST_CASE("separated clusters recover the global optimum") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = testing::uniform_int(rng, 2, 4);
      std::vector<double> v;
      for (int g = 0; g < k; ++g)
        for (int i = 0; i < testing::uniform_int(rng, 1, 3); ++i) v.push_back(100.0 * g + testing::uniform(rng, 0, 1));
      const auto got = kmeans_1d(v, k, rng());
      const auto want = testing::exhaustive_kmeans_1d(v, k);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("nearest centroid with low tie-break") {
    Discretizer d;
    d.centroids.emplace_back(std::vector<double>{0.5, 10.5});
    const Dataset coded = apply_discretizer(d, column({0.5, 10.5, -3, 5.5, 5.6, 99}));
    const double want[] = {1, 2, 1, 1, 2, 2};
    for (int i = 0; i < 6; ++i) CHECK(coded.features()(i, 0) == want[i]);
    CHECK(coded.all_categorical());
  }

  TEST_CASE("codes are stable under refitting") {
    std::mt19937_64 rng(79);
    const Dataset d = testing::random_continuous(rng, 50, 3, 2);
    const Dataset codes = apply_discretizer(fit_discretizer(d, 5, 1), d);
    CHECK_THROWS_AS(fit_discretizer(codes, 5, 1), SchemaError);
    Discretizer pass;
    pass.centroids.assign(3, std::nullopt);
    CHECK(apply_discretizer(pass, codes).features() == codes.features());
    // Refitting on the codes as continuous values maps every code to itself.
    const Dataset as_cont = codes.with_features(codes.features(), Schema(3, FeatureSpec::continuous()));
    CHECK(apply_discretizer(fit_discretizer(as_cont, 5, 1), as_cont).features() == codes.features());
  }

  TEST_CASE("centroids are strictly increasing and JSON round trips") {
    std::mt19937_64 rng(83);
    const Dataset d = testing::random_continuous(rng, 60, 2, 2);
    const Discretizer disc = fit_discretizer(d, 5, 3);
    for (const auto& c : disc.centroids) {
      REQUIRE(c);
      CHECK(std::adjacent_find(c->begin(), c->end(), std::greater_equal<>()) == c->end());
    }
    const Discretizer back = discretizer_from_json(nlohmann::json::parse(to_json(disc).dump()));
    CHECK(back.centroids == disc.centroids);
  }
}

TEST_SUITE("split") {
  TEST_CASE("sizes and partition") {
    std::mt19937_64 rng(89);
    const Dataset d = testing::random_categorical(rng, 100, 2, 3, 3);
    const Split s = split(d, SplitSpec{0.25, 7, 0});
    CHECK(s.train.size() == 75);
    CHECK(s.test.size() == 25);
    std::set<Eigen::Index> all(s.train_rows.begin(), s.train_rows.end());
    for (auto i : s.test_rows) CHECK(all.insert(i).second);
    CHECK(all.size() == 100);
  }

  TEST_CASE("deterministic in (seed, repetition)") {
    std::mt19937_64 rng(97);
    const Dataset d = testing::random_categorical(rng, 40, 2, 2, 3);
    CHECK(split(d, {0.25, 5, 2}).train_rows == split(d, {0.25, 5, 2}).train_rows);
    CHECK(split(d, {0.25, 5, 2}).train_rows != split(d, {0.25, 5, 3}).train_rows);
  }

  TEST_CASE("four instances, two per class") {
    MatrixXd x(4, 1);
    x << 1, 2, 3, 4;
    Eigen::VectorXi y(4);
    y << 0, 0, 1, 1;
    const Dataset d(x, y, {FeatureSpec::continuous()}, 2);
    for (int rep = 0; rep < 20; ++rep) {
      const Split s = split(d, {0.5, 11, rep});
      CHECK((s.train.class_counts().array() == 1).all());
      CHECK((s.test.class_counts().array() == 1).all());
    }
    // At 25% the single test instance cannot hold both classes; train still does.
    const Split q = split(d, {0.25, 11, 0});
    CHECK((q.train.class_counts().array() >= 1).all());
  }

  TEST_CASE("impossible coverage raises") {
    MatrixXd x(4, 1);
    x << 1, 2, 3, 4;
    Eigen::VectorXi y(4);
    y << 0, 1, 2, 3;
    const Dataset d(x, y, {FeatureSpec::continuous()}, 4);
    CHECK_THROWS_AS(split(d, {0.25, 0, 0}), StratificationError);
    CHECK_THROWS_AS(split(d, {1.0, 0, 0}), std::invalid_argument);
  }
}
