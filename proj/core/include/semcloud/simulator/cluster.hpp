#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semcloud/common/pilot_record.hpp"

namespace semcloud::sim {

struct NodeSpec {
  std::string name;
  double memory = 1536;    // nm, MB
  double storage = 20480;  // nst, MB
  double cpu = 4000;       // millicores

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct StorageTier {
  double capacity = 0;    // MB, 0 means unbounded
  double throughput = 0;  // MB/s
  double latency = 0;     // s per write

  friend bool operator==(const StorageTier&, const StorageTier&) = default;
};

struct ClusterSpec {
  std::vector<NodeSpec> nodes;
  double queue_latency = 0.005;  // s per message hop
  StorageTier fast{10240, 200, 0.002};
  StorageTier cloud{0, 40, 0.03};

  /// Seven identical nodes.
  static ClusterSpec desk_default();
  /// One node with effectively unlimited memory and cpu, used for
  /// estimation runs.
  static ClusterSpec unbounded_node();
  static ClusterSpec uniform(std::size_t count, NodeSpec node);

  const StorageTier& tier(StorageMode mode) const { return mode == StorageMode::Fast ? fast : cloud; }

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

/// Throws ConfigError on an empty node list or non-positive capacities.
void check(const ClusterSpec& cluster);

/// Per-step coefficients of the analytic cost model. Throughputs are in
/// records/s, memory coefficients are MB of working memory per MB of
/// records held by a message, `base` is the resident memory of an instance.
struct StepCost {
  double throughput = 1;
  double overhead = 0;  // s per message
  double alpha = 1;
  double base = 0;      // MB
  double cpu = 1000;    // millicores while busy
  double expansion = 1; // storage MB written per MB of input

  friend bool operator==(const StepCost&, const StepCost&) = default;
};

struct CostModel {
  StepCost retrieve{200000, 0.05, 1.0, 32, 500, 0};
  StepCost slice{100000, 0.01, 4.0, 64, 1000, 1.0};
  StepCost prepare{2000, 0.05, 5.0, 48, 1000, 1.3};
  StepCost store{1e12, 0, 1.0, 32, 500, 1.3};
  double publish_overhead = 0.002;  // s per slice published

  double legacy_kappa = 5.0;  // MB of memory per MB processed
  double legacy_base = 128;   // MB
  double legacy_threads = 8;

  double noise = 0;  // relative amplitude in [0, 0.5]
  std::uint64_t seed = 1;
  double restart_penalty = 1.0;  // multiple of the failed attempt
  int max_restarts = 3;

  static CostModel desk_default() { return {}; }

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// Throws ConfigError when a coefficient is non-positive or noise is out
/// of range.
void check(const CostModel& cost);

std::string serialize_cluster(const ClusterSpec& cluster);
ClusterSpec parse_cluster(std::string_view json);
std::string serialize_cost_model(const CostModel& cost);
CostModel parse_cost_model(std::string_view json);

/// Summary of the input the simulator needs: record count, record size and
/// the number of machines. Records are laid out machine by machine, the
/// order in which the retrieve step reads per-machine sources.
struct SimWorkload {
  double n = 0;
  double record_bytes = 1250;
  std::size_t machines = 45;

  double volume() const { return n * record_bytes / 1e6; }  // MB
  /// Records of machine m under the machine-major layout.
  std::size_t machine_records(std::size_t m) const;
  std::size_t machine_of(std::size_t record) const;
};

}  // namespace semcloud::sim
