#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semcloud/learning/dataset.hpp"
#include "semcloud/learning/knn.hpp"
#include "semcloud/learning/mlp.hpp"
#include "semcloud/learning/polyr.hpp"

namespace semcloud::learn {

enum class Method { PolyR, MLP, KNN };

std::string_view to_string(Method method);
/// "polyr", "mlp", "knn" (case-insensitive); throws ConfigError.
Method parse_method(std::string_view text);

struct HyperParams {
  int degree = 4;
  bool cross_terms = false;
  std::vector<int> hidden{10, 9};
  MLPTrainConfig train;
  int k = 2;

  /// The parameters relevant to `method`, e.g. "degree=4" or "k=2".
  std::string describe(Method method) const;
};

/// A fitted model plus the names it was trained on.
class LearnedFunction {
 public:
  using Model = std::variant<PolyRModel, MLPModel, KNNModel>;

  LearnedFunction(std::string target, Model model);

  Method method() const noexcept;
  const std::string& target() const noexcept { return target_; }
  const std::vector<std::string>& features() const;
  const Model& model() const noexcept { return model_; }

  /// Weight count for PolyR/MLP, stored sample count for KNN.
  std::size_t size() const;

  double predict(std::span<const double> x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

 private:
  std::string target_;
  Model model_;
};

LearnedFunction fit(Method method, const Dataset& train, const HyperParams& params);

}  // namespace semcloud::learn
