#include "semcloud/learning/polyr.hpp"

#include <cmath>

#include "semcloud/errors.hpp"
#include "semcloud/learning/dataset.hpp"

namespace semcloud::learn {

std::size_t polyr_weight_count(std::size_t features, int degree, bool cross_terms) {
  std::size_t n = 1 + features * static_cast<std::size_t>(degree);
  if (cross_terms) n += features * (features - 1) / 2;
  return n;
}

Eigen::MatrixXd polyr_design(const Eigen::MatrixXd& scaled, int degree, bool cross_terms) {
  const auto f = static_cast<std::size_t>(scaled.cols());
  Eigen::MatrixXd D(scaled.rows(), static_cast<Eigen::Index>(polyr_weight_count(f, degree, cross_terms)));
  D.col(0).setOnes();
  Eigen::Index c = 1;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    Eigen::VectorXd power = scaled.col(j);
    for (int p = 1; p <= degree; ++p) {
      D.col(c++) = power;
      power = power.cwiseProduct(scaled.col(j));
    }
  }
  if (cross_terms) {
    for (Eigen::Index i = 0; i < scaled.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < scaled.cols(); ++j) D.col(c++) = scaled.col(i).cwiseProduct(scaled.col(j));
    }
  }
  return D;
}

PolyRModel fit_polyr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int degree,
                     std::vector<std::string> features, bool cross_terms) {
  if (degree < 1) throw InvalidInput("polyr degree must be >= 1");
  if (X.rows() != y.size()) throw DimensionMismatch("polyr: X and y row counts differ");
  if (!features.empty() && features.size() != static_cast<std::size_t>(X.cols())) {
    throw DimensionMismatch("polyr: feature names do not match columns");
  }
  require_finite(X, "polyr features");
  require_finite(y, "polyr targets");
  const std::size_t weights = polyr_weight_count(static_cast<std::size_t>(X.cols()), degree, cross_terms);
  if (static_cast<std::size_t>(X.rows()) <= weights) {
    throw InsufficientData("polyr: " + std::to_string(X.rows()) + " samples for " + std::to_string(weights) +
                           " weights");
  }

  PolyRModel model;
  model.degree = degree;
  model.cross_terms = cross_terms;
  model.features = std::move(features);
  model.scale = X.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < model.scale.size(); ++j) {
    if (model.scale(j) == 0.0) model.scale(j) = 1.0;
  }
  const Eigen::MatrixXd scaled = X.array().rowwise() / model.scale.transpose().array();
  const Eigen::MatrixXd D = polyr_design(scaled, degree, cross_terms);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() == D.cols()) {
    model.weights = qr.solve(y);
  } else {
    model.rank_deficient = true;
    model.weights = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(D).solve(y);
  }
  return model;
}

Eigen::VectorXd predict_polyr(const PolyRModel& model, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != model.input_dim()) {
    throw DimensionMismatch("polyr expects " + std::to_string(model.input_dim()) + " features, got " +
                            std::to_string(X.cols()));
  }
  require_finite(X, "polyr input");
  const Eigen::MatrixXd scaled = X.array().rowwise() / model.scale.transpose().array();
  return polyr_design(scaled, model.degree, model.cross_terms) * model.weights;
}

double predict_polyr(const PolyRModel& model, std::span<const double> x) {
  const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  return predict_polyr(model, Eigen::MatrixXd(row))(0);
}

}  // namespace semcloud::learn
