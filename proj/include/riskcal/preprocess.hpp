#pragma once

#include "riskcal/dataset.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace riskcal {

enum class HeaderMode {
  /// First row is a header when any of its feature cells is not numeric.
  Auto,
  Present,
  Absent,
};

enum class KindHint {
  /// Integer-valued columns with codes in 1..max_inferred_cardinality are
  /// categorical; everything else is continuous.
  Infer,
  AllContinuous,
  AllCategorical,
};

struct CsvOptions {
  HeaderMode header = HeaderMode::Auto;
  KindHint kinds = KindHint::Infer;
  int max_inferred_cardinality = 10;
};

/// Comma-separated numeric features with the class label in the last column.
/// Labels are re-encoded 0..r-1 in order of first appearance. Throws
/// ParseError (with the line number) for ragged rows, non-numeric cells and
/// single-class data.
Dataset read_csv(std::istream& in, const CsvOptions& options = {},
                 std::vector<std::string>* header_out = nullptr);
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {},
                 std::vector<std::string>* header_out = nullptr);

/// Writes features with 17 significant digits and the original label tokens.
void write_csv(const Dataset& data, std::ostream& out, const std::vector<std::string>& header = {});

/// Per-feature 1-D k-means bins. Features without centroids (categorical in
/// the fitting data) pass through unchanged.
struct Discretizer {
  std::vector<std::optional<std::vector<double>>> centroids;

  std::size_t feature_count() const { return centroids.size(); }
};

/// Sorted 1-D k-means centroids: farthest-point seeding from a random first
/// value, then Lloyd passes until assignments stop changing (at most 100).
/// With d < k distinct values the centroids are those values.
std::vector<double> kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed);

/// Fits one k-means per continuous feature of the training data.
Discretizer fit_discretizer(const Dataset& train, int bins = 5, std::uint64_t seed = 0);

/// Maps each discretized value to the 1-based index of its nearest centroid
/// (lower index on ties). The result is fully categorical.
Dataset apply_discretizer(const Discretizer& discretizer, const Dataset& data);

nlohmann::json to_json(const Discretizer& discretizer);
Discretizer discretizer_from_json(const nlohmann::json& doc);

struct SplitSpec {
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
  int repetition = 0;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
};

/// Seeded shuffle split: ceil((1 - f) m) instances go to train. Re-shuffles
/// (up to 100 attempts) until train holds every class, and test too when its
/// size allows. Throws StratificationError if train never covers all classes.
Split split(const Dataset& data, const SplitSpec& spec);

}  // namespace riskcal
