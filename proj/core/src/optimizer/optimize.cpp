#include <algorithm>
#include <memory>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"
#include "semcloud/optimizer/optimizer.hpp"

namespace semcloud::opt {

TimeModel::TimeModel(Fn fn, std::string description) : fn_(std::move(fn)), description_(std::move(description)) {}

const std::vector<std::string>& slicing_feature_names() {
  static const std::vector<std::string> names{"v",      "n",      "nc",         "ns",        "ts",
                                              "tp",     "chunks", "slices",     "log_chunks", "log_slices"};
  return names;
}

double slicing_feature(const std::string& name, const SlicingQuery& q, double nc, double ns) {
  if (name == "v") return q.v;
  if (name == "n") return q.n;
  if (name == "nc") return nc;
  if (name == "ns") return ns;
  if (name == "ts") return q.ts;
  if (name == "tp") return q.tp;
  if (name == "chunks") return q.n / nc;
  if (name == "slices") return nc / ns;
  if (name == "log_chunks") return std::log2(q.n / nc);
  if (name == "log_slices") return std::log2(nc / ns);
  throw SchemaError("unknown slicing feature '" + name + "'");
}

TimeModel TimeModel::from_learned(learn::LearnedFunction function) {
  const auto& names = slicing_feature_names();
  for (const auto& f : function.features()) {
    if (std::find(names.begin(), names.end(), f) == names.end()) {
      throw SignatureMismatch("time model feature '" + f + "' is not a slicing feature");
    }
  }
  if (function.features().empty()) throw SignatureMismatch("time model needs named features");
  const bool per_record = function.target() == "time_per_record";
  std::string description = std::string(learn::to_string(function.method())) + " -> " + function.target();
  auto shared = std::make_shared<const learn::LearnedFunction>(std::move(function));
  return TimeModel(
      [shared, per_record](const SlicingQuery& q, double nc, double ns) {
        std::vector<double> x;
        x.reserve(shared->features().size());
        for (const auto& f : shared->features()) x.push_back(slicing_feature(f, q, nc, ns));
        const double y = shared->predict(x);
        return per_record ? y * q.n : y;
      },
      std::move(description));
}

learn::Dataset make_time_dataset(const std::vector<PilotRunRecord>& records, const std::vector<std::string>& features,
                                 const std::string& target, std::optional<StorageMode> mode) {
  std::vector<const PilotRunRecord*> rows;
  for (const auto& r : records) {
    if (r.kind != RunKind::Configuration) continue;
    if (mode && r.mode != *mode) continue;
    if (r.n <= 0 || r.nc <= 0 || r.ns <= 0) continue;
    rows.push_back(&r);
  }
  learn::Dataset d;
  d.features = features;
  d.target = target;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PilotRunRecord& r = *rows[i];
    const SlicingQuery q{r.v, r.n, r.ts, r.tp};
    for (std::size_t j = 0; j < features.size(); ++j) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = slicing_feature(features[j], q, r.nc, r.ns);
    }
    d.y(static_cast<Eigen::Index>(i)) = target == "time_per_record" ? r.total_time / r.n : field(r, target);
  }
  return d;
}

namespace {

struct Candidate {
  std::size_t i = 0, j = 0;
  double nc = 0, ns = 0, t = 0;
};

// Strict "a is better than b": lower time, then larger ns, then larger nc.
bool better(const Candidate& a, const Candidate& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.ns != b.ns) return a.ns > b.ns;
  return a.nc > b.nc;
}

class Evaluator {
 public:
  Evaluator(const TimeModel& model, const SlicingQuery& query, const SearchSpace& space)
      : model_(model), query_(query), space_(space) {}

  std::optional<Candidate> at(std::size_t i, std::size_t j) {
    const auto p = space_.at(i, j);
    if (!p) return std::nullopt;
    const double t = model_(query_, p->first, p->second);
    ++evaluations;
    if (!std::isfinite(t)) {
      throw NonFiniteModel("time model is not finite at nc=" + std::to_string(p->first) +
                           ", ns=" + std::to_string(p->second));
    }
    return Candidate{i, j, p->first, p->second, t};
  }

  std::size_t evaluations = 0;

 private:
  const TimeModel& model_;
  const SlicingQuery& query_;
  const SearchSpace& space_;
};

OptResult result_of(const Candidate& c, std::size_t evaluations) { return OptResult{c.nc, c.ns, c.t, evaluations}; }

// Indices 0, stride, 2*stride, ..., always including the last.
std::vector<std::size_t> coarse(std::size_t count, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count; k += stride) out.push_back(k);
  if (out.empty() || out.back() != count - 1) out.push_back(count - 1);
  return out;
}

std::optional<Candidate> best_over(Evaluator& ev, const std::vector<std::size_t>& is, const std::vector<std::size_t>& js) {
  std::optional<Candidate> best;
  for (std::size_t i : is) {
    for (std::size_t j : js) {
      if (auto c = ev.at(i, j); c && (!best || better(*c, *best))) best = c;
    }
  }
  return best;
}

std::vector<std::size_t> all(std::size_t count) { return coarse(count, 1); }

Candidate refine(Evaluator& ev, const SearchSpace& space, Candidate current, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    const Candidate before = current;
    if (auto c = best_over(ev, all(space.nc_count()), {current.j}); c && better(*c, current)) current = *c;
    if (auto c = best_over(ev, {current.i}, all(space.ns_count())); c && better(*c, current)) current = *c;
    if (current.i == before.i && current.j == before.j) break;
  }
  return current;
}

}  // namespace

OptResult optimize_slicing(const TimeModel& model, const SlicingQuery& query, const SearchSpace& space,
                           SearchMode mode) {
  if (!model) throw InvalidInput("no time model");
  if (space.nc_count() == 0 || space.ns_count() == 0 || space.feasible_count() == 0) {
    throw EmptySpace("slicing search space has no feasible point for n=" + std::to_string(query.n));
  }
  Evaluator ev(model, query, space);
  if (mode == SearchMode::Exhaustive) {
    const Candidate best = *best_over(ev, all(space.nc_count()), all(space.ns_count()));
    return result_of(best, ev.evaluations);
  }
  auto start = best_over(ev, coarse(space.nc_count(), 3), coarse(space.ns_count(), 3));
  if (!start) start = best_over(ev, all(space.nc_count()), all(space.ns_count()));
  const Candidate c = refine(ev, space, *start, 10);
  return result_of(c, ev.evaluations);
}

OptResult coordinate_refine(const TimeModel& model, const SlicingQuery& query, std::pair<std::size_t, std::size_t> start,
                            const SearchSpace& space, int rounds) {
  Evaluator ev(model, query, space);
  const auto c = ev.at(start.first, start.second);
  if (!c) throw InvalidInput("refinement must start at a feasible grid point");
  return result_of(refine(ev, space, *c, rounds), ev.evaluations);
}

std::vector<CurvePoint> sweet_spot_curve(const TimeModel& model, const SlicingQuery& query, double nc,
                                         const std::vector<double>& ns_values) {
  if (ns_values.empty()) throw InvalidInput("sweet-spot curve needs slice sizes");
  std::vector<CurvePoint> out;
  for (double ns : ns_values) out.push_back(CurvePoint{ns, model(query, nc, ns)});
  return out;
}

std::size_t curve_minimum(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw InvalidInput("empty curve");
  std::size_t best = 0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    const auto& a = curve[k];
    const auto& b = curve[best];
    if (a.predicted_time < b.predicted_time || (a.predicted_time == b.predicted_time && a.ns > b.ns)) best = k;
  }
  return best;
}

std::string format_curve_csv(const std::vector<CurvePoint>& curve, double nc) {
  csv::Table t;
  t.header = {"nc", "ns", "predicted_time"};
  for (const auto& p : curve) t.rows.push_back({csv::number(nc), csv::number(p.ns), csv::number(p.predicted_time)});
  return csv::format(t);
}

std::string format_opt_csv(const std::vector<std::pair<SlicingQuery, OptResult>>& rows) {
  csv::Table t;
  t.header = {"v", "n", "ts", "tp", "nc", "ns", "predicted_time", "evaluations"};
  for (const auto& [q, r] : rows) {
    t.rows.push_back({csv::number(q.v), csv::number(q.n), csv::number(q.ts), csv::number(q.tp), csv::number(r.nc),
                      csv::number(r.ns), csv::number(r.predicted_time), std::to_string(r.evaluations)});
  }
  return csv::format(t);
}

}  // namespace semcloud::opt
