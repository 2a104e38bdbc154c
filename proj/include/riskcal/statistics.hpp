#pragma once

#include <Eigen/Dense>

#include <vector>

namespace riskcal {

/// Model family owning a statistics layout.
enum class ModelFamily { NaiveBayes, Qda, Toy };

const char* to_string(ModelFamily family);

/// Sufficient statistics of one class: zeroth moment, a first-order block and,
/// for QDA, the second-moment matrix.
///
/// NaiveBayes: `first` holds the per-feature per-value counts, concatenated
/// feature by feature. Qda: `first` is the n-vector of sums and `second` the
/// n x n sum of outer products. Toy: `first` is the scalar sum of x.
struct ClassBlock {
  double count = 0.0;
  Eigen::VectorXd first;
  Eigen::MatrixXd second;
};

/// Class-blocked additive statistics. Counts are plain reals and may become
/// non-integral, zero or negative during calibration; parameter mappings
/// decide what is valid.
class StatisticsVector {
 public:
  StatisticsVector() = default;
  /// `segments` lists the per-feature cardinalities that partition `first`
  /// for the NaiveBayes layout; it is empty for the other families.
  StatisticsVector(ModelFamily family, std::vector<ClassBlock> blocks,
                   std::vector<int> segments = {});

  /// All-zero statistics with r classes, first-block size k, and an n x n
  /// second block when `second_dim` > 0.
  static StatisticsVector zeros(ModelFamily family, int class_count, Eigen::Index first_size,
                                Eigen::Index second_dim = 0, std::vector<int> segments = {});

  ModelFamily family() const { return family_; }
  int class_count() const { return static_cast<int>(blocks_.size()); }
  const ClassBlock& block(int y) const { return blocks_[static_cast<std::size_t>(y)]; }
  ClassBlock& block(int y) { return blocks_[static_cast<std::size_t>(y)]; }
  const std::vector<ClassBlock>& blocks() const { return blocks_; }
  const std::vector<int>& segments() const { return segments_; }

  /// Equivalent sample size: the sum of the class counts.
  double sample_size() const;

  /// Blocks concatenated class by class as (count, first, second row-major).
  Eigen::VectorXd flatten() const;

  bool same_layout(const StatisticsVector& other) const;

  StatisticsVector& operator+=(const StatisticsVector& other);

 private:
  ModelFamily family_ = ModelFamily::NaiveBayes;
  std::vector<ClassBlock> blocks_;
  std::vector<int> segments_;
};

/// a + scale * b. Throws std::invalid_argument on layout mismatch.
StatisticsVector stats_add_scaled(const StatisticsVector& a, const StatisticsVector& b, double scale);

}  // namespace riskcal
