#include "semcloud/learning/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "semcloud/errors.hpp"
#include "semcloud/learning/metrics.hpp"

namespace semcloud::learn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Model size implied by the hyper-parameters alone, used for tie-breaks.
std::size_t complexity(Method method, const HyperParams& p, std::size_t features) {
  switch (method) {
    case Method::PolyR:
      return polyr_weight_count(features, std::max(p.degree, 1), p.cross_terms);
    case Method::MLP: {
      std::size_t n = 0;
      std::size_t in = features;
      for (int w : p.hidden) {
        n += (in + 1) * static_cast<std::size_t>(std::max(w, 0));
        in = static_cast<std::size_t>(std::max(w, 0));
      }
      return n + in + 1;
    }
    case Method::KNN:
      return static_cast<std::size_t>(std::max(p.k, 0));
  }
  return 0;
}

double held_out_nmae(const LearnedFunction& f, const Dataset& test) {
  const Eigen::VectorXd pred = f.predict(test.X);
  return nmae(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
              std::span<const double>(test.y.data(), static_cast<std::size_t>(test.y.size())));
}

}  // namespace

std::string FitReport::to_json(bool with_timings) const {
  nlohmann::ordered_json j;
  j["method"] = to_string(method);
  j["target"] = target;
  j["params"] = params;
  if (std::isfinite(nmae)) j["nmae"] = nmae;
  else j["nmae"] = nullptr;
  j["model_size"] = model_size;
  j["train_rows"] = train_rows;
  j["test_rows"] = test_rows;
  j["rank_deficient"] = rank_deficient;
  if (with_timings) {
    j["learning_time_ms"] = learning_time_ms;
    j["inference_time_ms"] = inference_time_ms;
  }
  if (min_train_fraction) j["min_train_fraction"] = *min_train_fraction;
  return j.dump();
}

FitReport evaluate_point(Method method, const HyperParams& params, const Split& split) {
  FitReport r;
  r.method = method;
  r.target = split.train.target;
  r.params = params.describe(method);
  r.train_rows = split.train.rows();
  r.test_rows = split.test.rows();

  const auto t0 = Clock::now();
  const LearnedFunction f = fit(method, split.train, params);
  r.learning_time_ms = elapsed_ms(t0);
  r.model_size = f.size();
  if (const auto* p = std::get_if<PolyRModel>(&f.model())) r.rank_deficient = p->rank_deficient;

  const auto t1 = Clock::now();
  r.nmae = held_out_nmae(f, split.test);
  r.inference_time_ms = elapsed_ms(t1) / static_cast<double>(std::max<std::size_t>(1, r.test_rows));
  return r;
}

GridResult grid_search(Method method, const std::vector<HyperParams>& grid, const Dataset& data,
                       std::uint64_t split_seed, double train_fraction) {
  if (grid.empty()) throw InvalidInput("grid search needs at least one point");
  const Split s = split(data, train_fraction, split_seed);

  GridResult out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    FitReport r;
    try {
      r = evaluate_point(method, grid[i], s);
    } catch (const Error&) {
      r.method = method;
      r.target = data.target;
      r.params = grid[i].describe(method);
      r.train_rows = s.train.rows();
      r.test_rows = s.test.rows();
      r.nmae = kInf;
    }
    out.all.push_back(r);
    if (i == 0) continue;
    const double a = out.all[i].nmae;
    const double b = out.all[best].nmae;
    const bool tie = (std::isinf(a) && std::isinf(b)) || std::abs(a - b) <= kNmaeTieTolerance;
    if (tie) {
      if (complexity(method, grid[i], data.features.size()) < complexity(method, grid[best], data.features.size())) {
        best = i;
      }
    } else if (a < b) {
      best = i;
    }
  }
  out.best = grid[best];
  out.report = out.all[best];
  return out;
}

std::vector<HyperParams> default_grid(Method method, const HyperParams& base) {
  std::vector<HyperParams> grid;
  switch (method) {
    case Method::PolyR:
      for (int m = 1; m <= 6; ++m) {
        grid.push_back(base);
        grid.back().degree = m;
      }
      break;
    case Method::MLP:
      for (const std::vector<int>& h : {std::vector<int>{8}, std::vector<int>{10, 9}, std::vector<int>{20, 10}}) {
        grid.push_back(base);
        grid.back().hidden = h;
      }
      break;
    case Method::KNN:
      for (int k : {1, 2, 5, 10}) {
        grid.push_back(base);
        grid.back().k = k;
      }
      break;
  }
  return grid;
}

SweepResult min_train_fraction_sweep(Method method, const HyperParams& params, const Dataset& data,
                                     double target_nmae, std::vector<double> fractions, std::uint64_t seed,
                                     int resamples) {
  if (resamples < 1) throw InvalidInput("sweep needs at least one resample");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidInput("sweep fractions must lie in (0, 1]");
  }
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  const std::size_t n = data.rows();
  const auto pool = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  std::vector<std::vector<std::size_t>> orders;
  std::vector<Dataset> tests;
  for (int r = 0; r < resamples; ++r) {
    auto order = shuffled_indices(n, seed + static_cast<std::uint64_t>(r));
    tests.push_back(subset(data, std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(pool), order.end())));
    orders.push_back(std::move(order));
  }

  SweepResult out;
  for (double fraction : fractions) {
    SweepPoint point;
    point.fraction = fraction;
    const auto rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool))));
    for (int r = 0; r < resamples; ++r) {
      const auto& order = orders[static_cast<std::size_t>(r)];
      const Dataset train = subset(data, std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rows)));
      double score = kInf;
      try {
        score = held_out_nmae(fit(method, train, params), tests[static_cast<std::size_t>(r)]);
      } catch (const Error&) {
      }
      point.nmaes.push_back(score);
    }
    double sum = 0;
    for (double v : point.nmaes) sum += v;
    point.mean_nmae = sum / static_cast<double>(resamples);
    if (!out.min_fraction && point.mean_nmae <= target_nmae) out.min_fraction = fraction;
    out.points.push_back(std::move(point));
  }
  return out;
}

}  // namespace semcloud::learn
