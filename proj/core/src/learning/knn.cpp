#include "semcloud/learning/knn.hpp"

#include <algorithm>
#include <numeric>

#include "semcloud/errors.hpp"
#include "semcloud/learning/dataset.hpp"

namespace semcloud::learn {

KNNModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, std::vector<std::string> features) {
  if (X.rows() == 0) throw EmptyModel("knn: no samples");
  if (X.rows() != y.size()) throw DimensionMismatch("knn: X and y row counts differ");
  if (k < 1) throw InvalidInput("knn: k must be >= 1");
  if (k > X.rows()) {
    throw InsufficientData("knn: k=" + std::to_string(k) + " exceeds " + std::to_string(X.rows()) + " samples");
  }
  require_finite(X, "knn features");
  require_finite(y, "knn targets");
  const Standardizer s = Standardizer::fit(X);
  KNNModel model;
  model.k = k;
  model.features = std::move(features);
  model.input_mean = s.mean;
  model.input_scale = s.scale;
  model.samples = s.apply(X);
  model.targets = y;
  return model;
}

double predict_knn(const KNNModel& model, std::span<const double> x) {
  if (model.size() == 0) throw EmptyModel("knn: empty model");
  if (x.size() != model.input_dim()) {
    throw DimensionMismatch("knn expects " + std::to_string(model.input_dim()) + " features, got " +
                            std::to_string(x.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> raw(x.data(), static_cast<Eigen::Index>(x.size()));
  require_finite(Eigen::VectorXd(raw), "knn input");
  const Eigen::VectorXd q = (raw - model.input_mean).cwiseQuotient(model.input_scale);

  const auto n = model.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (model.samples.row(static_cast<Eigen::Index>(i)).transpose() - q).norm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto k = static_cast<std::size_t>(model.k);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });

  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = order[r];
    if (dist[i] == 0.0) return model.targets(static_cast<Eigen::Index>(i));
    const double w = 1.0 / dist[i];
    num += w * model.targets(static_cast<Eigen::Index>(i));
    den += w;
  }
  return num / den;
}

Eigen::VectorXd predict_knn(const KNNModel& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXd out(X.rows());
  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    out(i) = predict_knn(model, row);
  }
  return out;
}

}  // namespace semcloud::learn
