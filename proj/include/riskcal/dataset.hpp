#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace riskcal {

enum class FeatureKind { Categorical, Continuous };

/// Kind of one feature column. Categorical columns hold integer codes
/// 1..cardinality stored as doubles.
struct FeatureSpec {
  FeatureKind kind = FeatureKind::Continuous;
  int cardinality = 0;

  static FeatureSpec categorical(int cardinality) { return {FeatureKind::Categorical, cardinality}; }
  static FeatureSpec continuous() { return {FeatureKind::Continuous, 0}; }

  bool is_categorical() const { return kind == FeatureKind::Categorical; }
  bool operator==(const FeatureSpec&) const = default;
};

using Schema = std::vector<FeatureSpec>;

/// Labeled instances: an m x n feature matrix, class labels in 0..r-1 and a
/// per-column schema. Immutable once constructed.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, Eigen::VectorXi labels, Schema schema, int class_count,
          std::vector<std::string> class_names = {});

  Eigen::Index size() const { return features_.rows(); }
  Eigen::Index feature_count() const { return features_.cols(); }
  int class_count() const { return class_count_; }

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXi& labels() const { return labels_; }
  const Schema& schema() const { return schema_; }
  /// Original label tokens, indexed by class. Defaults to "1".."r".
  const std::vector<std::string>& class_names() const { return class_names_; }

  auto instance(Eigen::Index i) const { return features_.row(i); }
  int label(Eigen::Index i) const { return labels_(i); }

  bool all_categorical() const;
  bool all_continuous() const;

  /// Rows in the given order; schema and class set are kept.
  Dataset subset(std::span<const Eigen::Index> rows) const;
  /// Same labels with replaced features and schema.
  Dataset with_features(Eigen::MatrixXd features, Schema schema) const;

  /// m x r indicator matrix of the labels.
  Eigen::MatrixXd one_hot_labels() const;
  /// Number of instances per class.
  Eigen::VectorXi class_counts() const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXi labels_;
  Schema schema_;
  int class_count_;
  std::vector<std::string> class_names_;
};

/// Throws SchemaError unless every feature is categorical.
void require_categorical(const Dataset& data, const char* who);
/// Throws SchemaError unless every feature is continuous.
void require_continuous(const Dataset& data, const char* who);

}  // namespace riskcal
