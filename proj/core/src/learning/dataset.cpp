#include "semcloud/learning/dataset.hpp"

#include <cmath>
#include <utility>

#include "semcloud/errors.hpp"

namespace semcloud::learn {

Dataset make_dataset(const std::vector<PilotRunRecord>& records, const std::vector<std::string>& features,
                     const std::string& target, std::optional<RunKind> kind) {
  std::vector<const PilotRunRecord*> rows;
  for (const auto& r : records) {
    if (!kind || r.kind == *kind) rows.push_back(&r);
  }
  Dataset data;
  data.features = features;
  data.target = target;
  data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
  data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ri = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < features.size(); ++j) data.X(ri, static_cast<Eigen::Index>(j)) = field(*rows[i], features[j]);
    data.y(ri) = field(*rows[i], target);
  }
  return data;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.features = data.features;
  out.target = data.target;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(static_cast<Eigen::Index>(rows[i]));
    out.y(static_cast<Eigen::Index>(i)) = data.y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::uint64_t state = seed;
  for (std::size_t i = n; i > 1; --i) {
    // Multiply-shift bound; bias is negligible for n << 2^32.
    const auto j = static_cast<std::size_t>((splitmix64(state) >> 32) * i >> 32);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

Split split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  const auto idx = shuffled_indices(data.rows(), seed);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.rows())));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return Split{subset(data, train), subset(data, test)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  s.mean = X.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Ones(X.cols());
  if (X.rows() > 1) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double var = (X.col(j).array() - s.mean(j)).square().sum() / static_cast<double>(X.rows());
      if (var > 0) s.scale(j) = std::sqrt(var);
    }
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const { return (x - mean).cwiseQuotient(scale); }

void require_finite(const Eigen::MatrixXd& X, const char* what) {
  if (!X.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite values");
}

void require_finite(const Eigen::VectorXd& x, const char* what) {
  if (!x.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite values");
}

}  // namespace semcloud::learn
