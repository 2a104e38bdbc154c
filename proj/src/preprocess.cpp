#include "riskcal/preprocess.hpp"

#include "riskcal/errors.hpp"
#include "riskcal/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace riskcal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Unbiased draw from 0..bound-1; spelled out so shuffles do not depend on the
// standard library's distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvOptions& options, std::vector<std::string>* header_out) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> label_tokens;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool first_row = true;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (first_row) {
      first_row = false;
      columns = fields.size();
      if (columns < 2) throw ParseError(line_no, "need at least one feature column and a label column");
      bool is_header = options.header == HeaderMode::Present;
      if (options.header == HeaderMode::Auto) {
        for (std::size_t j = 0; j + 1 < fields.size(); ++j)
          if (!parse_number(fields[j])) is_header = true;
      }
      if (is_header) {
        for (auto f : fields) header.emplace_back(f);
        continue;
      }
    }
    if (fields.size() != columns)
      throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, found " +
                                    std::to_string(fields.size()));
    std::vector<double> row(columns - 1);
    for (std::size_t j = 0; j + 1 < columns; ++j) {
      const auto v = parse_number(fields[j]);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + std::string(fields[j]) + "' in column " +
                                            std::to_string(j + 1));
      row[j] = *v;
    }
    if (fields.back().empty()) throw ParseError(line_no, "empty class label");
    rows.push_back(std::move(row));
    label_tokens.emplace_back(fields.back());
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ParseError(0, "no data rows");

  std::map<std::string, int> codes;
  std::vector<std::string> names;
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(columns - 1);
  Eigen::VectorXi labels(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& tok = label_tokens[static_cast<std::size_t>(i)];
    auto [it, inserted] = codes.emplace(tok, static_cast<int>(names.size()));
    if (inserted) names.push_back(tok);
    labels(i) = it->second;
  }
  if (names.size() < 2) throw ParseError(0, "single-class dataset");

  Eigen::MatrixXd x(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  Schema schema;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto col = x.col(j);
    const bool integral = (col.array() == col.array().round()).all();
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    switch (options.kinds) {
      case KindHint::AllContinuous:
        schema.push_back(FeatureSpec::continuous());
        break;
      case KindHint::AllCategorical: {
        if (!integral || lo < 1) {
          for (Eigen::Index i = 0; i < m; ++i)
            if (col(i) != std::round(col(i)) || col(i) < 1)
              throw ParseError(line_numbers[static_cast<std::size_t>(i)],
                               "column " + std::to_string(j + 1) + " is not a positive integer code");
        }
        schema.push_back(FeatureSpec::categorical(static_cast<int>(hi)));
        break;
      }
      case KindHint::Infer:
        if (integral && lo >= 1 && hi <= options.max_inferred_cardinality)
          schema.push_back(FeatureSpec::categorical(static_cast<int>(hi)));
        else
          schema.push_back(FeatureSpec::continuous());
        break;
    }
  }

  if (header_out) *header_out = std::move(header);
  const int r = static_cast<int>(names.size());
  return Dataset(std::move(x), std::move(labels), std::move(schema), r, std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options,
                 std::vector<std::string>* header_out) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return read_csv(in, options, header_out);
}

void write_csv(const Dataset& data, std::ostream& out, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  const auto& x = data.features();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << format_double(x(i, j)) << ',';
    out << data.class_names()[static_cast<std::size_t>(data.label(i))] << '\n';
  }
}

std::vector<double> kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("kmeans_1d: no values");
  if (k < 1) throw std::invalid_argument("kmeans_1d: k must be positive");

  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= static_cast<std::size_t>(k)) return distinct;

  // Farthest-point seeding; ties go to the smaller value.
  auto rng = seeded(seed, 0);
  std::vector<double> centroids{values[draw_below(rng, values.size())]};
  std::vector<double> gap(distinct.size(), std::numeric_limits<double>::infinity());
  while (centroids.size() < static_cast<std::size_t>(k)) {
    std::size_t far = 0;
    for (std::size_t v = 0; v < distinct.size(); ++v) {
      gap[v] = std::min(gap[v], std::abs(distinct[v] - centroids.back()));
      if (gap[v] > gap[far]) far = v;
    }
    centroids.push_back(distinct[far]);
  }
  std::sort(centroids.begin(), centroids.end());

  auto nearest = [&](double v) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < centroids.size(); ++c)
      if (std::abs(v - centroids[c]) < std::abs(v - centroids[best])) best = c;
    return best;
  };

  std::vector<std::size_t> assign(values.size(), centroids.size());
  for (int pass = 0; pass < 100; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto c = nearest(values[i]);
      changed |= c != assign[i];
      assign[i] = c;
    }
    if (!changed) break;
    std::vector<double> sum(centroids.size(), 0.0);
    std::vector<std::size_t> count(centroids.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[assign[i]] += values[i];
      ++count[assign[i]];
    }
    std::vector<double> next;
    for (std::size_t c = 0; c < centroids.size(); ++c)
      if (count[c] > 0) next.push_back(sum[c] / static_cast<double>(count[c]));
    if (next.size() != centroids.size()) std::fill(assign.begin(), assign.end(), next.size());
    std::sort(next.begin(), next.end());
    centroids = std::move(next);
  }
  centroids.erase(std::unique(centroids.begin(), centroids.end()), centroids.end());
  return centroids;
}

Discretizer fit_discretizer(const Dataset& train, int bins, std::uint64_t seed) {
  if (bins < 1) throw std::invalid_argument("bins must be positive");
  if (train.all_categorical()) throw SchemaError("discretizer: no continuous features to discretize");
  Discretizer d;
  const auto& x = train.features();
  for (Eigen::Index j = 0; j < train.feature_count(); ++j) {
    if (train.schema()[static_cast<std::size_t>(j)].is_categorical()) {
      d.centroids.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> col(x.col(j).begin(), x.col(j).end());
    auto rng = seeded(seed, static_cast<std::uint64_t>(j) + 1);
    d.centroids.emplace_back(kmeans_1d(col, bins, rng()));
  }
  return d;
}

Dataset apply_discretizer(const Discretizer& discretizer, const Dataset& data) {
  if (discretizer.feature_count() != static_cast<std::size_t>(data.feature_count()))
    throw SchemaError("discretizer expects " + std::to_string(discretizer.feature_count()) + " features, data has " +
                      std::to_string(data.feature_count()));
  Eigen::MatrixXd x = data.features();
  Schema schema = data.schema();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto& cents = discretizer.centroids[static_cast<std::size_t>(j)];
    const auto ju = static_cast<std::size_t>(j);
    if (!cents) {
      if (!schema[ju].is_categorical())
        throw SchemaError("feature " + std::to_string(j + 1) + " is continuous but has no centroids");
      continue;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      std::size_t best = 0;
      for (std::size_t c = 1; c < cents->size(); ++c)
        if (std::abs(v - (*cents)[c]) < std::abs(v - (*cents)[best])) best = c;
      x(i, j) = static_cast<double>(best + 1);
    }
    schema[ju] = FeatureSpec::categorical(static_cast<int>(cents->size()));
  }
  return data.with_features(std::move(x), std::move(schema));
}

nlohmann::json to_json(const Discretizer& discretizer) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& c : discretizer.centroids) features.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
  return {{"centroids", features}};
}

Discretizer discretizer_from_json(const nlohmann::json& doc) {
  Discretizer d;
  for (const auto& entry : doc.at("centroids")) {
    if (entry.is_null()) {
      d.centroids.emplace_back(std::nullopt);
      continue;
    }
    auto c = entry.get<std::vector<double>>();
    if (c.empty() || !std::is_sorted(c.begin(), c.end()) ||
        std::adjacent_find(c.begin(), c.end()) != c.end())
      throw std::invalid_argument("centroids must be non-empty and strictly increasing");
    d.centroids.emplace_back(std::move(c));
  }
  return d;
}

Split split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  const auto m = static_cast<std::size_t>(data.size());
  if (m < 4) throw std::invalid_argument("split needs at least 4 instances");

  // The small slack keeps exact products such as 0.75 * 100 from rounding up.
  auto train_size = static_cast<std::size_t>(std::ceil((1.0 - spec.test_fraction) * static_cast<double>(m) - 1e-9));
  train_size = std::clamp<std::size_t>(train_size, 1, m - 1);
  const std::size_t test_size = m - train_size;

  const auto r = static_cast<std::size_t>(data.class_count());
  const Eigen::VectorXi counts = data.class_counts();
  const bool test_coverable = test_size >= r && train_size >= r && (counts.array() >= 2).all();

  auto covers = [&](std::span<const Eigen::Index> rows) {
    std::vector<bool> seen(r, false);
    for (auto i : rows) seen[static_cast<std::size_t>(data.label(i))] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };

  auto rng = seeded(spec.seed, static_cast<std::uint64_t>(spec.repetition));
  std::vector<Eigen::Index> order(m);
  std::optional<std::vector<Eigen::Index>> fallback;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<Eigen::Index>(i);
    for (std::size_t i = m - 1; i > 0; --i) std::swap(order[i], order[draw_below(rng, i + 1)]);
    const std::span<const Eigen::Index> train_part(order.data(), train_size);
    const std::span<const Eigen::Index> test_part(order.data() + train_size, test_size);
    if (!covers(train_part)) continue;
    if (!test_coverable || covers(test_part)) {
      fallback = order;
      break;
    }
    if (!fallback) fallback = order;
  }
  if (!fallback) throw StratificationError("no shuffle in 100 attempts put every class in the training part");

  Split out{data, data, {}, {}};
  out.train_rows.assign(fallback->begin(), fallback->begin() + static_cast<std::ptrdiff_t>(train_size));
  out.test_rows.assign(fallback->begin() + static_cast<std::ptrdiff_t>(train_size), fallback->end());
  out.train = data.subset(out.train_rows);
  out.test = data.subset(out.test_rows);
  return out;
}

}  // namespace riskcal
