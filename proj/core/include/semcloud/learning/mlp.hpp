#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace semcloud::learn {

struct MLPTrainConfig {
  int epochs = 400;
  double step_size = 0.05;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  int checkpoint_every = 10;  // epochs between recorded full-set losses
};

/// Fully connected network with ReLU on every hidden layer and on the single
/// output neuron. Inputs are standardized and the target divided by its
/// mean absolute value; both transforms are part of the model.
struct MLPModel {
  std::vector<int> widths;  // input, hidden..., 1
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
  std::vector<std::string> features;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  double target_scale = 1.0;
  std::vector<double> loss_history;  // training loss at each checkpoint

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(widths.front()); }
  std::size_t weight_count() const;
};

/// He-initialized network (seeded); identity transforms.
MLPModel init_mlp(std::size_t inputs, const std::vector<int>& hidden, std::uint64_t seed);

/// Mini-batch gradient descent on half mean squared error. Throws InvalidInput
/// (empty widths, non-finite data), InsufficientData (no rows), Divergence
/// (non-finite loss).
MLPModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& hidden,
                 const MLPTrainConfig& config, std::vector<std::string> features = {});

double predict_mlp(const MLPModel& model, std::span<const double> x);
Eigen::VectorXd predict_mlp(const MLPModel& model, const Eigen::MatrixXd& X);

// Raw network access on transformed inputs/targets, used for training and
// gradient checks.

/// All weights and biases, layer by layer (W column-major, then b).
Eigen::VectorXd mlp_parameters(const MLPModel& model);
void set_mlp_parameters(MLPModel& model, const Eigen::VectorXd& theta);
/// Network output for transformed input rows.
Eigen::VectorXd mlp_forward(const MLPModel& model, const Eigen::MatrixXd& Z);
/// 0.5 * mean((f(Z) - t)^2).
double mlp_loss(const MLPModel& model, const Eigen::MatrixXd& Z, const Eigen::VectorXd& t);
/// Backpropagated gradient of mlp_loss, in mlp_parameters order.
Eigen::VectorXd mlp_gradient(const MLPModel& model, const Eigen::MatrixXd& Z, const Eigen::VectorXd& t);

}  // namespace semcloud::learn
