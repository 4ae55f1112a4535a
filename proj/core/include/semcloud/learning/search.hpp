#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcloud/learning/learned_function.hpp"

namespace semcloud::learn {

struct FitReport {
  Method method = Method::PolyR;
  std::string target;
  std::string params;  // HyperParams::describe
  double nmae = 0;     // held-out
  std::size_t model_size = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  bool rank_deficient = false;
  double learning_time_ms = 0;
  double inference_time_ms = 0;  // per prediction
  std::optional<double> min_train_fraction;

  /// JSON object; timings only when `with_timings`.
  std::string to_json(bool with_timings = true) const;
};

/// Two nmae values closer than this count as a tie.
inline constexpr double kNmaeTieTolerance = 1e-9;

/// Fits and scores one hyper-parameter point on a fixed split.
FitReport evaluate_point(Method method, const HyperParams& params, const Split& split);

struct GridResult {
  HyperParams best;
  FitReport report;
  std::vector<FitReport> all;  // one per grid point, in grid order
};

/// Seeded 80/20 split; every grid point is fitted on the training part and
/// scored on the held-out part. The lowest nmae wins; ties (within
/// kNmaeTieTolerance) go to the smaller model. Points that cannot be fitted
/// (e.g. too few rows) score +inf.
GridResult grid_search(Method method, const std::vector<HyperParams>& grid, const Dataset& data,
                       std::uint64_t split_seed, double train_fraction = 0.8);

/// Standard grids: PolyR degree 1..6, MLP a few layouts, KNN k in {1,2,5,10}.
std::vector<HyperParams> default_grid(Method method, const HyperParams& base = {});

struct SweepPoint {
  double fraction = 0;
  double mean_nmae = 0;
  std::vector<double> nmaes;  // one per resample
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> min_fraction;  // smallest fraction with mean nmae <= target
};

/// For each resample r (seed + r) the data are shuffled and split 80/20; the
/// model is trained on the first `fraction` of the 80% pool and scored on
/// the 20%. Fractions must lie in (0, 1]; they are processed in ascending order.
SweepResult min_train_fraction_sweep(Method method, const HyperParams& params, const Dataset& data,
                                     double target_nmae, std::vector<double> fractions, std::uint64_t seed,
                                     int resamples = 5);

}  // namespace semcloud::learn
