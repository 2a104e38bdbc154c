#include "riskcal/statistics.hpp"

#include <stdexcept>

namespace riskcal {

const char* to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::NaiveBayes: return "nb";
    case ModelFamily::Qda: return "qda";
    case ModelFamily::Toy: return "toy";
  }
  return "?";
}

StatisticsVector::StatisticsVector(ModelFamily family, std::vector<ClassBlock> blocks,
                                   std::vector<int> segments)
    : family_(family), blocks_(std::move(blocks)), segments_(std::move(segments)) {
  for (const auto& b : blocks_) {
    if (b.first.size() != blocks_.front().first.size() ||
        b.second.rows() != blocks_.front().second.rows() ||
        b.second.rows() != b.second.cols())
      throw std::invalid_argument("statistics blocks have inconsistent shapes");
  }
  if (!segments_.empty() && !blocks_.empty()) {
    Eigen::Index total = 0;
    for (int c : segments_) total += c;
    if (total != blocks_.front().first.size())
      throw std::invalid_argument("statistics segments do not cover the first block");
  }
}

StatisticsVector StatisticsVector::zeros(ModelFamily family, int class_count,
                                         Eigen::Index first_size, Eigen::Index second_dim,
                                         std::vector<int> segments) {
  std::vector<ClassBlock> blocks(static_cast<std::size_t>(class_count));
  for (auto& b : blocks) {
    b.first = Eigen::VectorXd::Zero(first_size);
    b.second = Eigen::MatrixXd::Zero(second_dim, second_dim);
  }
  return StatisticsVector(family, std::move(blocks), std::move(segments));
}

double StatisticsVector::sample_size() const {
  double total = 0.0;
  for (const auto& b : blocks_) total += b.count;
  return total;
}

Eigen::VectorXd StatisticsVector::flatten() const {
  if (blocks_.empty()) return {};
  const Eigen::Index k = blocks_.front().first.size();
  const Eigen::Index q = blocks_.front().second.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(blocks_.size()) * (1 + k + q));
  Eigen::Index pos = 0;
  for (const auto& b : blocks_) {
    out(pos++) = b.count;
    out.segment(pos, k) = b.first;
    pos += k;
    for (Eigen::Index r = 0; r < b.second.rows(); ++r)
      for (Eigen::Index c = 0; c < b.second.cols(); ++c) out(pos++) = b.second(r, c);
  }
  return out;
}

bool StatisticsVector::same_layout(const StatisticsVector& other) const {
  if (family_ != other.family_ || blocks_.size() != other.blocks_.size() ||
      segments_ != other.segments_)
    return false;
  if (blocks_.empty()) return true;
  return blocks_.front().first.size() == other.blocks_.front().first.size() &&
         blocks_.front().second.rows() == other.blocks_.front().second.rows();
}

StatisticsVector& StatisticsVector::operator+=(const StatisticsVector& other) {
  *this = stats_add_scaled(*this, other, 1.0);
  return *this;
}

StatisticsVector stats_add_scaled(const StatisticsVector& a, const StatisticsVector& b, double scale) {
  if (!a.same_layout(b)) throw std::invalid_argument("stats_add_scaled: layout mismatch");
  StatisticsVector out = a;
  for (int y = 0; y < a.class_count(); ++y) {
    auto& dst = out.block(y);
    const auto& src = b.block(y);
    dst.count += scale * src.count;
    dst.first += scale * src.first;
    if (dst.second.size() > 0) {
      dst.second += scale * src.second;
      // Rounding in the scaled sum can break exact symmetry.
      dst.second = (0.5 * (dst.second + dst.second.transpose())).eval();
    }
  }
  return out;
}

}  // namespace riskcal
