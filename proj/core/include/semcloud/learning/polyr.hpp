#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace semcloud::learn {

/// Least-squares polynomial regression on the per-feature expansion
/// [1, x1..x1^m, x2..x2^m, ...], optionally with pairwise products x_i*x_j.
/// Inputs are divided by the per-feature max |x| seen in training.
struct PolyRModel {
  int degree = 1;
  bool cross_terms = false;
  std::vector<std::string> features;
  Eigen::VectorXd scale;
  Eigen::VectorXd weights;
  bool rank_deficient = false;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(scale.size()); }
  std::size_t weight_count() const noexcept { return static_cast<std::size_t>(weights.size()); }
};

std::size_t polyr_weight_count(std::size_t features, int degree, bool cross_terms);

/// Design matrix of already-scaled inputs.
Eigen::MatrixXd polyr_design(const Eigen::MatrixXd& scaled, int degree, bool cross_terms);

/// Throws InsufficientData (samples <= weight count), InvalidInput
/// (non-finite data or degree < 1), DimensionMismatch. Rank-deficient
/// designs fall back to the minimum-norm solution and set rank_deficient.
PolyRModel fit_polyr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int degree,
                     std::vector<std::string> features = {}, bool cross_terms = false);

/// Throws DimensionMismatch or InvalidInput.
double predict_polyr(const PolyRModel& model, std::span<const double> x);
Eigen::VectorXd predict_polyr(const PolyRModel& model, const Eigen::MatrixXd& X);

}  // namespace semcloud::learn
