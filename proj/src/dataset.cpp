#include "riskcal/dataset.hpp"

#include "riskcal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace riskcal {

Dataset::Dataset(Eigen::MatrixXd features, Eigen::VectorXi labels, Schema schema, int class_count,
                 std::vector<std::string> class_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      schema_(std::move(schema)),
      class_count_(class_count),
      class_names_(std::move(class_names)) {
  if (class_count_ < 2) throw std::invalid_argument("dataset needs at least 2 classes");
  if (features_.rows() < 1) throw std::invalid_argument("dataset needs at least one instance");
  if (labels_.size() != features_.rows())
    throw std::invalid_argument("label count does not match instance count");
  if (static_cast<Eigen::Index>(schema_.size()) != features_.cols())
    throw std::invalid_argument("schema size does not match feature count");
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_(i) < 0 || labels_(i) >= class_count_)
      throw std::invalid_argument("label out of range at row " + std::to_string(i));
  }
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const auto& spec = schema_[j];
    if (!spec.is_categorical()) continue;
    if (spec.cardinality < 1)
      throw std::invalid_argument("feature " + std::to_string(j) + " has cardinality < 1");
    const auto col = features_.col(static_cast<Eigen::Index>(j));
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double v = col(i);
      if (v != std::round(v) || v < 1 || v > spec.cardinality)
        throw std::invalid_argument("feature " + std::to_string(j) + " row " + std::to_string(i) +
                                    ": categorical code outside 1.." +
                                    std::to_string(spec.cardinality));
    }
  }
  if (class_names_.empty()) {
    for (int y = 0; y < class_count_; ++y) class_names_.push_back(std::to_string(y + 1));
  } else if (static_cast<int>(class_names_.size()) != class_count_) {
    throw std::invalid_argument("class name count does not match class count");
  }
}

bool Dataset::all_categorical() const {
  return std::all_of(schema_.begin(), schema_.end(), [](const auto& s) { return s.is_categorical(); });
}

bool Dataset::all_continuous() const {
  return std::none_of(schema_.begin(), schema_.end(), [](const auto& s) { return s.is_categorical(); });
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  Eigen::VectorXi y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = features_.row(rows[k]);
    y(static_cast<Eigen::Index>(k)) = labels_(rows[k]);
  }
  return Dataset(std::move(x), std::move(y), schema_, class_count_, class_names_);
}

Dataset Dataset::with_features(Eigen::MatrixXd features, Schema schema) const {
  return Dataset(std::move(features), labels_, std::move(schema), class_count_, class_names_);
}

Eigen::MatrixXd Dataset::one_hot_labels() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size(), class_count_);
  for (Eigen::Index i = 0; i < size(); ++i) w(i, labels_(i)) = 1.0;
  return w;
}

Eigen::VectorXi Dataset::class_counts() const {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(class_count_);
  for (Eigen::Index i = 0; i < size(); ++i) ++counts(labels_(i));
  return counts;
}

void require_categorical(const Dataset& data, const char* who) {
  if (!data.all_categorical())
    throw SchemaError(std::string(who) + ": all features must be categorical");
}

void require_continuous(const Dataset& data, const char* who) {
  if (!data.all_continuous())
    throw SchemaError(std::string(who) + ": all features must be continuous");
}

}  // namespace riskcal
