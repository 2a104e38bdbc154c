#include "riskcal/serialize.hpp"

#include <stdexcept>

namespace riskcal {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Eigen::VectorXd row = m.row(i).transpose();
    rows.push_back(vector_json(row));
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

}  // namespace

json model_to_json(const GenerativeModel& model, const std::vector<std::string>& class_names) {
  json doc;
  doc["family"] = to_string(family_of(model));
  if (!class_names.empty()) doc["classes"] = class_names;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NbParameters>) {
          doc["class_prior"] = vector_json(p.class_prior);
          doc["cardinalities"] = p.cardinalities();
          json tables = json::array();
          for (const auto& t : p.cond_tables) tables.push_back(matrix_json(t));
          doc["cond_tables"] = tables;
        } else if constexpr (std::is_same_v<P, QdaParameters>) {
          doc["class_prior"] = vector_json(p.class_prior());
          json means = json::array();
          json covs = json::array();
          for (int y = 0; y < p.class_count(); ++y) {
            means.push_back(vector_json(p.mean(y)));
            covs.push_back(matrix_json(p.covariance(y)));
          }
          doc["means"] = means;
          doc["covariances"] = covs;
        } else {
          doc["means"] = vector_json(p.means);
        }
      },
      model);
  return doc;
}

GenerativeModel model_from_json(const json& doc) {
  try {
    const auto family = doc.at("family").get<std::string>();
    if (family == "nb") {
      NbParameters p;
      p.class_prior = vector_from(doc.at("class_prior"));
      for (const auto& t : doc.at("cond_tables")) p.cond_tables.push_back(matrix_from(t));
      for (const auto& t : p.cond_tables)
        if (t.rows() != p.class_prior.size()) throw std::invalid_argument("table rows must equal class count");
      return p;
    }
    if (family == "qda") {
      std::vector<Eigen::VectorXd> means;
      std::vector<Eigen::MatrixXd> covs;
      for (const auto& m : doc.at("means")) means.push_back(vector_from(m));
      for (const auto& c : doc.at("covariances")) covs.push_back(matrix_from(c));
      return QdaParameters(vector_from(doc.at("class_prior")), std::move(means), std::move(covs));
    }
    if (family == "toy") {
      const Eigen::VectorXd mu = vector_from(doc.at("means"));
      if (mu.size() != 2) throw std::invalid_argument("toy model needs two means");
      return ToyParameters{mu};
    }
    throw std::invalid_argument("unknown model family '" + family + "'");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace riskcal
