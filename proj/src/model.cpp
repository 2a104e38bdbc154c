#include "riskcal/model.hpp"

#include "riskcal/errors.hpp"

namespace riskcal {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

ModelFamily family_of(const GenerativeModel& model) {
  return std::visit(overloaded{[](const NbParameters&) { return ModelFamily::NaiveBayes; },
                               [](const QdaParameters&) { return ModelFamily::Qda; },
                               [](const ToyParameters&) { return ModelFamily::Toy; }},
                    model);
}

Eigen::MatrixXd posteriors(const GenerativeModel& model, const Dataset& data) {
  return std::visit(overloaded{[&](const NbParameters& p) { return nb_posteriors(p, data); },
                               [&](const QdaParameters& p) { return qda_posteriors(p, data); },
                               [&](const ToyParameters& p) { return toy_posteriors(p, data); }},
                    model);
}

ClassPosterior posterior(const GenerativeModel& model, const Eigen::RowVectorXd& x) {
  return std::visit(overloaded{[&](const NbParameters& p) { return nb_posterior(p, x); },
                               [&](const QdaParameters& p) { return qda_posterior(p, x); },
                               [&](const ToyParameters& p) {
                                 if (x.size() != 1) throw SchemaError("toy model takes one feature");
                                 return toy_posterior(p, x(0));
                               }},
                    model);
}

LossSummary dataset_losses(const GenerativeModel& model, const Dataset& data) {
  return losses_from_posteriors(posteriors(model, data), data.labels());
}

}  // namespace riskcal
