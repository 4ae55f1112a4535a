#include "semcloud/learning/mlp.hpp"

#include <cmath>
#include <random>

#include "semcloud/errors.hpp"
#include "semcloud/learning/dataset.hpp"

namespace semcloud::learn {

std::size_t MLPModel::weight_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < W.size(); ++l) n += static_cast<std::size_t>(W[l].size() + b[l].size());
  return n;
}

MLPModel init_mlp(std::size_t inputs, const std::vector<int>& hidden, std::uint64_t seed) {
  if (hidden.empty()) throw InvalidInput("mlp needs at least one hidden layer");
  if (inputs == 0) throw InvalidInput("mlp needs at least one input");
  MLPModel m;
  m.widths.push_back(static_cast<int>(inputs));
  for (int w : hidden) {
    if (w < 1) throw InvalidInput("mlp layer widths must be positive");
    m.widths.push_back(w);
  }
  m.widths.push_back(1);

  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
    const int fan_in = m.widths[l];
    const int fan_out = m.widths[l + 1];
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    Eigen::MatrixXd W(fan_out, fan_in);
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
      for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, c) = normal(rng);
    }
    m.W.push_back(std::move(W));
    m.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  // The output is rectified; start it on the active side near the scaled
  // target mean.
  m.b.back().setOnes();
  m.input_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inputs));
  m.input_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(inputs));
  return m;
}

Eigen::VectorXd mlp_parameters(const MLPModel& m) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(m.weight_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < m.W.size(); ++l) {
    theta.segment(k, m.W[l].size()) = Eigen::Map<const Eigen::VectorXd>(m.W[l].data(), m.W[l].size());
    k += m.W[l].size();
    theta.segment(k, m.b[l].size()) = m.b[l];
    k += m.b[l].size();
  }
  return theta;
}

void set_mlp_parameters(MLPModel& m, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != m.weight_count()) {
    throw DimensionMismatch("mlp parameter vector has the wrong length");
  }
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < m.W.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(m.W[l].data(), m.W[l].size()) = theta.segment(k, m.W[l].size());
    k += m.W[l].size();
    m.b[l] = theta.segment(k, m.b[l].size());
    k += m.b[l].size();
  }
}

namespace {

// Column-per-sample activations. pre[l] is the input to the rectifier of
// layer l, post[0] the network input.
struct Pass {
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> post;
};

Pass forward(const MLPModel& m, const Eigen::MatrixXd& Z) {
  Pass p;
  p.post.push_back(Z.transpose());
  for (std::size_t l = 0; l < m.W.size(); ++l) {
    Eigen::MatrixXd a = m.W[l] * p.post.back();
    a.colwise() += m.b[l];
    p.post.push_back(a.cwiseMax(0.0));
    p.pre.push_back(std::move(a));
  }
  return p;
}

Eigen::VectorXd backward(const MLPModel& m, const Pass& p, const Eigen::VectorXd& t) {
  const double n = static_cast<double>(t.size());
  Eigen::VectorXd grad(static_cast<Eigen::Index>(m.weight_count()));
  // Offsets of each layer's block.
  std::vector<Eigen::Index> offset(m.W.size());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < m.W.size(); ++l) {
    offset[l] = k;
    k += m.W[l].size() + m.b[l].size();
  }

  Eigen::MatrixXd delta = (p.post.back().row(0).transpose() - t).transpose() / n;
  for (std::size_t l = m.W.size(); l-- > 0;) {
    delta = delta.cwiseProduct((p.pre[l].array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd gW = delta * p.post[l].transpose();
    const Eigen::VectorXd gb = delta.rowwise().sum();
    grad.segment(offset[l], gW.size()) = Eigen::Map<const Eigen::VectorXd>(gW.data(), gW.size());
    grad.segment(offset[l] + gW.size(), gb.size()) = gb;
    if (l > 0) delta = m.W[l].transpose() * delta;
  }
  return grad;
}

}  // namespace

Eigen::VectorXd mlp_forward(const MLPModel& m, const Eigen::MatrixXd& Z) {
  return forward(m, Z).post.back().row(0).transpose();
}

double mlp_loss(const MLPModel& m, const Eigen::MatrixXd& Z, const Eigen::VectorXd& t) {
  return 0.5 * (mlp_forward(m, Z) - t).squaredNorm() / static_cast<double>(t.size());
}

Eigen::VectorXd mlp_gradient(const MLPModel& m, const Eigen::MatrixXd& Z, const Eigen::VectorXd& t) {
  return backward(m, forward(m, Z), t);
}

MLPModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& hidden,
                 const MLPTrainConfig& config, std::vector<std::string> features) {
  if (X.rows() == 0) throw InsufficientData("mlp: no training rows");
  if (X.rows() != y.size()) throw DimensionMismatch("mlp: X and y row counts differ");
  if (!features.empty() && features.size() != static_cast<std::size_t>(X.cols())) {
    throw DimensionMismatch("mlp: feature names do not match columns");
  }
  require_finite(X, "mlp features");
  require_finite(y, "mlp targets");

  MLPModel m = init_mlp(static_cast<std::size_t>(X.cols()), hidden, config.seed);
  m.features = std::move(features);
  const Standardizer s = Standardizer::fit(X);
  m.input_mean = s.mean;
  m.input_scale = s.scale;
  const double mean_abs = y.cwiseAbs().mean();
  m.target_scale = mean_abs > 0 ? mean_abs : 1.0;

  const Eigen::MatrixXd Z = s.apply(X);
  const Eigen::VectorXd t = y / m.target_scale;
  const auto n = static_cast<std::size_t>(Z.rows());
  const std::size_t batch = std::max<std::size_t>(1, std::min(config.batch_size, n));

  Eigen::VectorXd theta = mlp_parameters(m);
  auto checkpoint = [&](int epoch) {
    const double loss = mlp_loss(m, Z, t);
    if (!std::isfinite(loss)) throw Divergence("mlp loss became non-finite at epoch " + std::to_string(epoch));
    m.loss_history.push_back(loss);
  };
  checkpoint(0);

  std::uint64_t shuffle_seed = config.seed ^ 0x5851f42d4c957f2dULL;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = shuffled_indices(n, shuffle_seed++);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      Eigen::MatrixXd Zb(static_cast<Eigen::Index>(end - start), Z.cols());
      Eigen::VectorXd tb(static_cast<Eigen::Index>(end - start));
      for (std::size_t i = start; i < end; ++i) {
        Zb.row(static_cast<Eigen::Index>(i - start)) = Z.row(static_cast<Eigen::Index>(order[i]));
        tb(static_cast<Eigen::Index>(i - start)) = t(static_cast<Eigen::Index>(order[i]));
      }
      theta -= config.step_size * mlp_gradient(m, Zb, tb);
      set_mlp_parameters(m, theta);
    }
    if (config.checkpoint_every > 0 && (epoch % config.checkpoint_every == 0 || epoch == config.epochs)) {
      checkpoint(epoch);
    }
  }
  if (!theta.allFinite()) throw Divergence("mlp weights became non-finite");
  return m;
}

Eigen::VectorXd predict_mlp(const MLPModel& m, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != m.input_dim()) {
    throw DimensionMismatch("mlp expects " + std::to_string(m.input_dim()) + " features, got " +
                            std::to_string(X.cols()));
  }
  require_finite(X, "mlp input");
  const Eigen::MatrixXd Z = (X.rowwise() - m.input_mean.transpose()).array().rowwise() /
                            m.input_scale.transpose().array();
  return mlp_forward(m, Z) * m.target_scale;
}

double predict_mlp(const MLPModel& m, std::span<const double> x) {
  const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  return predict_mlp(m, Eigen::MatrixXd(row))(0);
}

}  // namespace semcloud::learn
