#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace semcloud::learn {

/// Inverse-distance weighted k-nearest-neighbour regression over
/// standardized features.
struct KNNModel {
  int k = 1;
  std::vector<std::string> features;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  Eigen::MatrixXd samples;  // standardized
  Eigen::VectorXd targets;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(input_mean.size()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(samples.rows()); }
};

/// Throws EmptyModel (no samples), InsufficientData (k > samples),
/// InvalidInput (k < 1 or non-finite data).
KNNModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, std::vector<std::string> features = {});

/// Sum of w*y over sum of w with w = 1/d over the k nearest samples (ties
/// by sample index). A sample at distance zero returns its target exactly.
double predict_knn(const KNNModel& model, std::span<const double> x);
Eigen::VectorXd predict_knn(const KNNModel& model, const Eigen::MatrixXd& X);

}  // namespace semcloud::learn
