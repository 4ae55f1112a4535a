#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/learning/dataset.hpp"
#include "semcloud/learning/learned_function.hpp"

namespace semcloud::opt {

/// Inputs of a slicing decision that do not vary during the search.
struct SlicingQuery {
  double v = 0;   // MB
  double n = 0;   // records
  double ts = 0;  // s
  double tp = 0;  // s
};

/// Predicted total time of a pipeline run under (nc, ns).
class TimeModel {
 public:
  using Fn = std::function<double(const SlicingQuery&, double nc, double ns)>;

  TimeModel() = default;
  TimeModel(Fn fn, std::string description = {});

  /// Wraps a learned function. Its features may be any of
  /// slicing_feature_names(); a target of "time_per_record" is multiplied
  /// back by n. Throws SignatureMismatch on unknown feature names.
  static TimeModel from_learned(learn::LearnedFunction function);

  double operator()(const SlicingQuery& q, double nc, double ns) const { return fn_(q, nc, ns); }
  const std::string& description() const noexcept { return description_; }
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
  std::string description_;
};

/// v, n, nc, ns, ts, tp, chunks (n/nc), slices (nc/ns), log_chunks,
/// log_slices (base 2).
const std::vector<std::string>& slicing_feature_names();
/// Throws SchemaError for unknown names.
double slicing_feature(const std::string& name, const SlicingQuery& q, double nc, double ns);

/// Dataset over configuration-kind pilot records for a time model. The
/// target is a pilot column or "time_per_record" (total_time / n).
learn::Dataset make_time_dataset(const std::vector<PilotRunRecord>& records, const std::vector<std::string>& features,
                                 const std::string& target = "total_time",
                                 std::optional<StorageMode> mode = std::nullopt);

struct Axis {
  double lo = 1;
  double hi = 1;
  int steps = 1;
  bool geometric = true;

  /// `steps` values from lo to hi inclusive.
  std::vector<double> values() const;
};

/// Candidate grid in index space: nc_i from `nc`, ns_ij from `ns` (taken as
/// a fraction of nc_i when `ns_relative`). Values are rounded to whole
/// records; points violating ns <= nc <= n are infeasible.
struct SearchSpace {
  double n = 0;
  Axis nc;
  Axis ns;
  bool ns_relative = true;

  /// nc in {n/64 .. n}, ns in {nc/64 .. nc}, both geometric with 16 steps.
  static SearchSpace desk_default(double n, int steps = 16, double span = 64);
  /// Single-line space at fixed nc.
  static SearchSpace line(double n, double nc, std::vector<double> ns_values);

  std::size_t nc_count() const;
  std::size_t ns_count() const;
  /// Rounded (nc, ns) at grid index (i, j); nullopt when infeasible.
  std::optional<std::pair<double, double>> at(std::size_t i, std::size_t j) const;
  std::size_t feasible_count() const;

  // Explicit value lists, used instead of the axes when non-empty.
  std::vector<double> nc_values;
  std::vector<double> ns_values;
};

struct OptResult {
  double nc = 0;
  double ns = 0;
  double predicted_time = 0;
  std::size_t evaluations = 0;
};

enum class SearchMode { Exhaustive, Refined };

/// argmin of the model over the feasible grid. Ties (equal predictions) go
/// to larger ns, then larger nc. Throws EmptySpace and NonFiniteModel.
OptResult optimize_slicing(const TimeModel& model, const SlicingQuery& query, const SearchSpace& space,
                           SearchMode mode = SearchMode::Exhaustive);

/// Alternating line searches over the nc and ns indices starting from
/// `start` (grid indices). Stops after `rounds` rounds or when a round does
/// not improve.
OptResult coordinate_refine(const TimeModel& model, const SlicingQuery& query, std::pair<std::size_t, std::size_t> start,
                            const SearchSpace& space, int rounds);

struct CurvePoint {
  double ns = 0;
  double predicted_time = 0;
};

/// Predicted time along ns at fixed nc, in the given order.
std::vector<CurvePoint> sweet_spot_curve(const TimeModel& model, const SlicingQuery& query, double nc,
                                         const std::vector<double>& ns_values);
/// Index of the curve minimum under the optimizer's tie-break.
std::size_t curve_minimum(const std::vector<CurvePoint>& curve);

std::string format_curve_csv(const std::vector<CurvePoint>& curve, double nc);
std::string format_opt_csv(const std::vector<std::pair<SlicingQuery, OptResult>>& rows);

}  // namespace semcloud::opt
