#pragma once

#include <cstddef>
#include <vector>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/simulator/deploy.hpp"
#include "semcloud/simulator/trace.hpp"

namespace semcloud::sim {

/// A run of records of one machine, as carried by a message.
struct RecordRange {
  std::size_t machine = 0;
  std::size_t first = 0;
  std::size_t count = 0;

  friend bool operator==(const RecordRange&, const RecordRange&) = default;
  friend auto operator<=>(const RecordRange&, const RecordRange&) = default;
};

struct RunOptions {
  bool record_series = true;
  /// Extra delay before the first instance of each step starts consuming.
  std::array<double, kStepCount> start_delay{};
};

struct RunResult {
  RunTrace trace;
  PilotRunRecord record;
  std::vector<RecordRange> stored;  // sorted
};

/// Discrete-event execution of the plan over the workload. Deterministic for
/// a given cost-model seed. Throws SimulatedOutOfMemory when an instance
/// keeps exceeding its reservation after max_restarts restarts and
/// CapacityExceeded when fast storage fills up.
RunResult run(const ExecutionPlan& plan, const SimWorkload& workload, const RunOptions& options = {});

/// Single-process baseline on one node: retrieve, prepare with
/// legacy_threads workers, store, all in sequence. Memory grows with the
/// processed volume. Throws SimulatedOutOfMemory when the node is too small.
RunTrace run_legacy(const SimWorkload& workload, const NodeSpec& node, const ClusterSpec& cluster,
                    const CostModel& cost, StorageMode mode = StorageMode::Fast, bool record_series = true);

}  // namespace semcloud::sim
