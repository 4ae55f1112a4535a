#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semcloud/common/pilot_record.hpp"

namespace semcloud::kg {

enum class TaskKind { Retrieve, Slice, Prepare, Store };
enum class FrequencyClass { Frequent, Infrequent };

std::string_view to_string(TaskKind kind);
std::string_view to_string(FrequencyClass frequency);
std::optional<TaskKind> parse_task_kind(std::string_view text);

struct RequirementSet {
  std::string id;
  double computing = 0;  // millicores
  double memory = 0;     // MB
  double storage = 0;    // MB
  double network = 0;    // MB/s

  friend bool operator==(const RequirementSet&, const RequirementSet&) = default;
};

struct IOHandler {
  std::string id;
  std::vector<std::string> inputs;   // DataEntity ids (hasInput)
  std::vector<std::string> outputs;  // DataEntity ids (hasOutput)

  friend bool operator==(const IOHandler&, const IOHandler&) = default;
};

struct TaskNode {
  std::string id;
  TaskKind kind = TaskKind::Prepare;
  std::string io;                       // hasIO
  std::vector<std::string> next;        // hasNextTask
  std::optional<std::string> requirement;
  std::optional<double> chunk_size;          // nc, Slice only
  std::optional<double> slice_size;          // ns, Slice only
  std::optional<double> memory_reservation;  // MB, Slice (mrs) or Prepare (mrp)
  std::optional<double> required_time;       // s, Slice (ts) or Prepare (tp)
  std::optional<StorageMode> storage_mode;   // Store only

  friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

struct Layer {
  std::string id;
  std::string type;  // RetrieveLayer, SliceLayer, PrepareLayer, StoreLayer
  std::vector<std::string> tasks;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct DataEntity {
  std::string id;
  std::optional<double> volume;      // v, MB
  std::optional<double> no_records;  // n
  std::optional<std::string> location;

  friend bool operator==(const DataEntity&, const DataEntity&) = default;
};

struct CloudAttributes {
  std::string id = "c";
  double c1 = 0.667;   // memory buffer coefficient
  double c2 = 0.667;   // storage buffer coefficient
  double c3 = 1.5;     // max memory coefficient
  double nm = 4096;    // node memory, MB
  double nst = 20480;  // node storage, MB
  std::string fs = "fast";
  std::string cs = "cloud";

  friend bool operator==(const CloudAttributes&, const CloudAttributes&) = default;
};

/// Throws StructureError when the coefficient ranges are violated.
void check(const CloudAttributes& cloud);

struct PipelineGraph {
  std::string id;
  FrequencyClass frequency = FrequencyClass::Frequent;
  std::optional<std::string> depends_on;
  std::string start_task;               // hasStartTask
  std::vector<std::string> input_data;  // hasInputData
  std::vector<Layer> layers;
  std::vector<TaskNode> tasks;
  std::vector<IOHandler> io_handlers;
  std::vector<DataEntity> data_entities;
  std::vector<RequirementSet> requirements;

  const TaskNode* task(std::string_view id) const;
  TaskNode* task(std::string_view id);
  const DataEntity* data_entity(std::string_view id) const;
  const IOHandler* io_handler(std::string_view id) const;

  /// Tasks of the given kind in declaration order.
  std::vector<const TaskNode*> tasks_of(TaskKind kind) const;

  friend bool operator==(const PipelineGraph&, const PipelineGraph&) = default;
};

/// A KG edge or attribute: (subject, property, object). Class membership
/// uses the property "type".
struct Triple {
  std::string subject;
  std::string property;
  std::variant<std::string, double> object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// All nodes and edges of the graph as triples, in a canonical order.
std::vector<Triple> to_triples(const PipelineGraph& graph);

/// Vocabulary checks used by the fact converters.
bool is_kg_class(std::string_view name);
bool is_kg_property(std::string_view name);
/// Properties whose object is another node of the same pipeline.
bool is_kg_reference(std::string_view property);

/// Rebuilds a graph from triples describing exactly one ETLPipeline.
/// Throws SchemaError on unknown classes/properties or mistyped objects.
/// The result is not validated.
PipelineGraph from_triples(const std::vector<Triple>& triples);

/// Result of the rule_3 family of rules, written back onto a pipeline.
struct ResourceConfiguration {
  std::string pipeline;
  double nc = 0;
  double ns = 0;
  StorageMode mode = StorageMode::Fast;
  double mrs = 0;
  double mrp = 0;

  friend bool operator==(const ResourceConfiguration&, const ResourceConfiguration&) = default;
};

/// Copies `graph` with the configuration written onto its Slice, Prepare and
/// Store tasks. Throws InvalidGraph on an id mismatch and MissingTask when a
/// frequent pipeline has no Slice or any pipeline lacks Prepare/Store.
PipelineGraph apply_configuration(const PipelineGraph& graph, const ResourceConfiguration& config);

}  // namespace semcloud::kg
