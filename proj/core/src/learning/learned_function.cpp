#include "semcloud/learning/learned_function.hpp"

#include <algorithm>
#include <cctype>

#include "semcloud/errors.hpp"

namespace semcloud::learn {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::PolyR: return "polyr";
    case Method::MLP: return "mlp";
    case Method::KNN: return "knn";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "polyr") return Method::PolyR;
  if (lower == "mlp") return Method::MLP;
  if (lower == "knn") return Method::KNN;
  throw ConfigError("unknown learning method '" + std::string(text) + "'");
}

std::string HyperParams::describe(Method method) const {
  switch (method) {
    case Method::PolyR:
      return "degree=" + std::to_string(degree) + (cross_terms ? ",cross" : "");
    case Method::MLP: {
      std::string s = "hidden=";
      for (std::size_t i = 0; i < hidden.size(); ++i) s += (i ? "x" : "") + std::to_string(hidden[i]);
      s += ",epochs=" + std::to_string(train.epochs);
      return s;
    }
    case Method::KNN:
      return "k=" + std::to_string(k);
  }
  return {};
}

LearnedFunction::LearnedFunction(std::string target, Model model)
    : target_(std::move(target)), model_(std::move(model)) {}

Method LearnedFunction::method() const noexcept {
  switch (model_.index()) {
    case 0: return Method::PolyR;
    case 1: return Method::MLP;
    default: return Method::KNN;
  }
}

const std::vector<std::string>& LearnedFunction::features() const {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.features; }, model_);
}

std::size_t LearnedFunction::size() const {
  if (const auto* p = std::get_if<PolyRModel>(&model_)) return p->weight_count();
  if (const auto* m = std::get_if<MLPModel>(&model_)) return m->weight_count();
  return std::get<KNNModel>(model_).size();
}

double LearnedFunction::predict(std::span<const double> x) const {
  if (const auto* p = std::get_if<PolyRModel>(&model_)) return predict_polyr(*p, x);
  if (const auto* m = std::get_if<MLPModel>(&model_)) return predict_mlp(*m, x);
  return predict_knn(std::get<KNNModel>(model_), x);
}

Eigen::VectorXd LearnedFunction::predict(const Eigen::MatrixXd& X) const {
  if (const auto* p = std::get_if<PolyRModel>(&model_)) return predict_polyr(*p, X);
  if (const auto* m = std::get_if<MLPModel>(&model_)) return predict_mlp(*m, X);
  return predict_knn(std::get<KNNModel>(model_), X);
}

LearnedFunction fit(Method method, const Dataset& train, const HyperParams& params) {
  switch (method) {
    case Method::PolyR:
      return {train.target, fit_polyr(train.X, train.y, params.degree, train.features, params.cross_terms)};
    case Method::MLP:
      return {train.target, fit_mlp(train.X, train.y, params.hidden, params.train, train.features)};
    case Method::KNN:
      return {train.target, fit_knn(train.X, train.y, params.k, train.features)};
  }
  throw ConfigError("unknown learning method");
}

}  // namespace semcloud::learn
