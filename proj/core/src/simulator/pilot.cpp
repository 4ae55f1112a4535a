#include "semcloud/simulator/pilot.hpp"

#include <cmath>

#include "semcloud/common/seed.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::sim {

PilotPlan PilotPlan::desk_default(double max_records) {
  PilotPlan p;
  p.configs = {{RunKind::Estimation, 1, 1, StorageMode::Fast}, {RunKind::Estimation, 1, 1, StorageMode::Cloud}};
  for (double nc : {1.0 / 64, 1.0 / 16, 1.0 / 4, 1.0}) {
    for (double ns : {1.0 / 64, 1.0 / 16, 1.0 / 4, 1.0}) p.configs.push_back({RunKind::Configuration, nc, ns});
  }
  p.seeds = {1, 2, 3};
  for (int k = 1; k <= 10; ++k) p.sizes.push_back(std::round(max_records * k / 10.0));
  return p;
}

PilotStats collect_pilot_stats(const PilotPlan& plan, const ClusterSpec& cluster, const CostModel& cost,
                               const std::string& pipeline) {
  if (plan.size() == 0) throw InvalidInput("pilot plan is empty");
  const ClusterSpec single = ClusterSpec::unbounded_node();
  PilotStats out;
  std::size_t row = 0;
  for (std::size_t c = 0; c < plan.configs.size(); ++c) {
    const PilotConfig& config = plan.configs[c];
    for (const auto seed : plan.seeds) {
      for (std::size_t z = 0; z < plan.sizes.size(); ++z, ++row) {
        const double n = std::floor(plan.sizes[z]);
        CostModel row_cost = cost;
        row_cost.seed = fnv1a(std::to_string(cost.seed) + "/" + std::to_string(seed) + "/" + std::to_string(c) + "/" +
                              std::to_string(z));
        DeploySettings s;
        s.pipeline = pipeline;
        s.n = n;
        s.record_bytes = plan.record_bytes;
        s.mode = config.mode;
        DeployOptions options;
        options.policy = ReservationPolicy::Need;
        const bool estimation = config.kind == RunKind::Estimation;
        if (estimation) {
          s.nc = s.ns = n;
          options.prepare_instances = 1;
        } else {
          s.nc = std::max(1.0, std::round(config.nc_fraction * n));
          s.ns = std::max(1.0, std::round(config.ns_fraction * s.nc));
        }
        try {
          const ExecutionPlan ep = deploy(s, estimation ? single : cluster, row_cost, options);
          RunOptions ro;
          ro.record_series = false;
          RunResult r = run(ep, SimWorkload{n, plan.record_bytes, plan.machines}, ro);
          r.record.kind = config.kind;
          out.records.push_back(r.record);
        } catch (const Error& e) {
          out.failures.push_back(PilotFailure{row, e.what()});
        }
      }
    }
  }
  return out;
}

opt::TimeModel simulated_time_model(const ClusterSpec& cluster, const CostModel& cost, double record_bytes,
                                    std::size_t machines) {
  CostModel quiet = cost;
  quiet.noise = 0;
  auto fn = [cluster, quiet, record_bytes, machines](const opt::SlicingQuery& q, double nc, double ns) {
    DeploySettings s;
    s.n = q.n;
    s.record_bytes = record_bytes;
    s.nc = nc;
    s.ns = ns;
    DeployOptions options;
    options.policy = ReservationPolicy::Need;
    RunOptions ro;
    ro.record_series = false;
    return run(deploy(s, cluster, quiet, options), SimWorkload{q.n, record_bytes, machines}, ro).record.total_time;
  };
  return opt::TimeModel(fn, "simulator");
}

}  // namespace semcloud::sim
