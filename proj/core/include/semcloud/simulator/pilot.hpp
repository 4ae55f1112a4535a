#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/optimizer/optimizer.hpp"
#include "semcloud/simulator/run.hpp"

namespace semcloud::sim {

/// One pilot configuration. Configuration runs use nc = nc_fraction * n and
/// ns = ns_fraction * nc; estimation runs are unsliced on a single
/// unbounded node.
struct PilotConfig {
  RunKind kind = RunKind::Configuration;
  double nc_fraction = 1;
  double ns_fraction = 1;
  StorageMode mode = StorageMode::Fast;
};

struct PilotPlan {
  std::vector<PilotConfig> configs;
  std::vector<std::uint64_t> seeds;
  std::vector<double> sizes;  // records
  double record_bytes = 1250;
  std::size_t machines = 45;

  /// 18 configs (2 estimation, a 4x4 configuration grid) x 3 seeds x 10
  /// sizes up to `max_records`.
  static PilotPlan desk_default(double max_records = 200000);
  std::size_t size() const { return configs.size() * seeds.size() * sizes.size(); }
};

struct PilotFailure {
  std::size_t index = 0;
  std::string message;
};

struct PilotStats {
  std::vector<PilotRunRecord> records;
  std::vector<PilotFailure> failures;
};

/// Runs every (config, seed, size) combination, in that nesting order. Run
/// errors are collected per row. Configuration runs use need-based
/// reservations on `cluster`. Each row's noise seed is derived from the
/// cost-model seed and the row's seed.
PilotStats collect_pilot_stats(const PilotPlan& plan, const ClusterSpec& cluster, const CostModel& cost,
                               const std::string& pipeline = "p");

/// Noise-free simulated total time under need-based reservations, usable as
/// an optimizer time model.
opt::TimeModel simulated_time_model(const ClusterSpec& cluster, const CostModel& cost, double record_bytes,
                                    std::size_t machines);

}  // namespace semcloud::sim
