#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semcloud/pipeline_kg/graph.hpp"
#include "semcloud/simulator/cluster.hpp"

namespace semcloud::sim {

enum class Step { Retrieve, Slice, Prepare, Store };
inline constexpr std::size_t kStepCount = 4;
std::string_view to_string(Step step);

/// Where instance memory reservations come from: the configured mrs / mrp
/// of the pipeline, or the cost model's need for one message plus noise
/// headroom.
enum class ReservationPolicy { Configured, Need };

struct DeploySettings {
  std::string pipeline = "p";
  double n = 0;
  double record_bytes = 1250;
  double nc = 0;
  double ns = 0;
  StorageMode mode = StorageMode::Fast;
  std::optional<double> mrs;
  std::optional<double> mrp;
  std::optional<double> ts;
  std::optional<double> tp;
};

/// Reads the configuration off a pipeline. Pipelines without a Slice task
/// run unsliced (nc = ns = n). Throws InvalidInput when n or v is missing
/// on the input data and MissingTask when Prepare or Store is absent.
DeploySettings settings_from(const kg::PipelineGraph& pipeline);

struct DeployOptions {
  ReservationPolicy policy = ReservationPolicy::Configured;
  std::size_t slice_instances = 1;
  std::size_t store_instances = 1;
  std::size_t max_prepare_instances = 64;
  /// Fixed prepare count instead of the throughput ratio, 0 to derive it.
  std::size_t prepare_instances = 0;
};

struct Instance {
  Step step = Step::Prepare;
  std::size_t node = 0;
  double reservation = 0;  // MB
  double cpu = 0;          // millicores
};

struct ExecutionPlan {
  DeploySettings settings;  // nc, ns clamped to ns <= nc <= max(n, 1)
  ClusterSpec cluster;
  CostModel cost;
  std::vector<Instance> instances;
  std::size_t prepare_demand = 0;

  std::size_t count(Step step) const;
  double reservation(Step step) const;
  /// Per node: sum of reservations.
  std::vector<double> reserved_memory() const;
  std::string describe() const;
};

/// Memory one instance of `step` needs for a message of `records` records.
double memory_need(const CostModel& cost, Step step, double records, double record_bytes);

/// Places retrieve, slice and store instances, then as many prepare
/// instances as the slice/prepare throughput ratio asks for and the nodes
/// hold, first fit in node order. Throws InsufficientResources naming the
/// binding constraint when a required instance does not fit.
ExecutionPlan deploy(const DeploySettings& settings, const ClusterSpec& cluster, const CostModel& cost,
                     const DeployOptions& options = {});
ExecutionPlan deploy(const kg::PipelineGraph& pipeline, const ClusterSpec& cluster, const CostModel& cost,
                     const DeployOptions& options = {});

}  // namespace semcloud::sim
