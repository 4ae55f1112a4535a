#include "semcloud/pipeline_kg/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semcloud/errors.hpp"

namespace semcloud::kg {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Retrieve: return "Retrieve";
    case TaskKind::Slice: return "Slice";
    case TaskKind::Prepare: return "Prepare";
    case TaskKind::Store: return "Store";
  }
  return "?";
}

std::string_view to_string(FrequencyClass frequency) {
  return frequency == FrequencyClass::Frequent ? "frequent" : "infrequent";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  if (text == "Retrieve") return TaskKind::Retrieve;
  if (text == "Slice") return TaskKind::Slice;
  if (text == "Prepare") return TaskKind::Prepare;
  if (text == "Store") return TaskKind::Store;
  return std::nullopt;
}

void check(const CloudAttributes& c) {
  if (!(c.c1 > 0 && c.c1 <= 1)) throw StructureError("cloud: c1 must be in (0, 1]");
  if (!(c.c2 > 0 && c.c2 <= 1)) throw StructureError("cloud: c2 must be in (0, 1]");
  if (!(c.c3 >= 1)) throw StructureError("cloud: c3 must be >= 1");
  if (!(c.nm > 0) || !(c.nst > 0)) throw StructureError("cloud: node memory and storage must be positive");
  if (c.fs.empty() || c.cs.empty() || c.fs == c.cs) throw StructureError("cloud: fs and cs must be distinct ids");
}

namespace {

template <typename T>
auto find_by_id(T& items, std::string_view id) -> decltype(&items[0]) {
  for (auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

}  // namespace

const TaskNode* PipelineGraph::task(std::string_view id) const { return find_by_id(tasks, id); }
TaskNode* PipelineGraph::task(std::string_view id) { return find_by_id(tasks, id); }
const DataEntity* PipelineGraph::data_entity(std::string_view id) const { return find_by_id(data_entities, id); }
const IOHandler* PipelineGraph::io_handler(std::string_view id) const { return find_by_id(io_handlers, id); }

std::vector<const TaskNode*> PipelineGraph::tasks_of(TaskKind kind) const {
  std::vector<const TaskNode*> out;
  for (const auto& t : tasks) {
    if (t.kind == kind) out.push_back(&t);
  }
  return out;
}

std::vector<Triple> to_triples(const PipelineGraph& g) {
  std::vector<Triple> out;
  auto add = [&](const std::string& s, const char* p, std::variant<std::string, double> o) {
    out.push_back(Triple{s, p, std::move(o)});
  };
  auto add_num = [&](const std::string& s, const char* p, const std::optional<double>& o) {
    if (o) add(s, p, *o);
  };

  add(g.id, "type", std::string("ETLPipeline"));
  add(g.id, "hasFrequency", std::string(to_string(g.frequency)));
  if (g.depends_on) add(g.id, "dependsOn", *g.depends_on);
  if (!g.start_task.empty()) add(g.id, "hasStartTask", g.start_task);
  for (const auto& d : g.input_data) add(g.id, "hasInputData", d);
  for (const auto& l : g.layers) add(g.id, "hasLayer", l.id);

  for (const auto& l : g.layers) {
    add(l.id, "type", l.type.empty() ? std::string("Layer") : l.type);
    for (const auto& t : l.tasks) add(l.id, "hasTask", t);
  }
  for (const auto& t : g.tasks) {
    add(t.id, "type", std::string(to_string(t.kind)));
    if (!t.io.empty()) add(t.id, "hasIO", t.io);
    for (const auto& n : t.next) add(t.id, "hasNextTask", n);
    if (t.requirement) add(t.id, "hasRequirement", *t.requirement);
    add_num(t.id, "hasChunkSize", t.chunk_size);
    add_num(t.id, "hasSliceSize", t.slice_size);
    add_num(t.id, "hasRequiredTime", t.required_time);
    add_num(t.id, "hasMemoryReservation", t.memory_reservation);
    if (t.storage_mode) add(t.id, "hasStorageMode", std::string(to_string(*t.storage_mode)));
  }
  for (const auto& h : g.io_handlers) {
    add(h.id, "type", std::string("IOHandler"));
    for (const auto& d : h.inputs) add(h.id, "hasInput", d);
    for (const auto& d : h.outputs) add(h.id, "hasOutput", d);
  }
  for (const auto& d : g.data_entities) {
    add(d.id, "type", std::string("DataEntity"));
    add_num(d.id, "hasVolume", d.volume);
    add_num(d.id, "hasNoRecords", d.no_records);
    if (d.location) add(d.id, "hasLocation", *d.location);
  }
  for (const auto& r : g.requirements) {
    add(r.id, "type", std::string("Requirement"));
    add(r.id, "hasComputing", r.computing);
    add(r.id, "hasMemory", r.memory);
    add(r.id, "hasStorage", r.storage);
    add(r.id, "hasNetwork", r.network);
  }
  return out;
}

namespace {

enum class NodeClass { Pipeline, Layer, Task, IO, Data, Requirement };

const std::map<std::string, NodeClass, std::less<>>& class_table() {
  static const std::map<std::string, NodeClass, std::less<>> table{
      {"ETLPipeline", NodeClass::Pipeline}, {"Layer", NodeClass::Layer},
      {"RetrieveLayer", NodeClass::Layer},  {"SliceLayer", NodeClass::Layer},
      {"PrepareLayer", NodeClass::Layer},   {"StoreLayer", NodeClass::Layer},
      {"Retrieve", NodeClass::Task},        {"Slice", NodeClass::Task},
      {"Prepare", NodeClass::Task},         {"Store", NodeClass::Task},
      {"IOHandler", NodeClass::IO},         {"DataEntity", NodeClass::Data},
      {"Requirement", NodeClass::Requirement},
  };
  return table;
}

struct PropertySpec {
  NodeClass owner;
  bool numeric;
};

const std::map<std::string, PropertySpec, std::less<>>& property_table() {
  static const std::map<std::string, PropertySpec, std::less<>> table{
      {"hasFrequency", {NodeClass::Pipeline, false}},
      {"dependsOn", {NodeClass::Pipeline, false}},
      {"hasStartTask", {NodeClass::Pipeline, false}},
      {"hasInputData", {NodeClass::Pipeline, false}},
      {"hasLayer", {NodeClass::Pipeline, false}},
      {"hasTask", {NodeClass::Layer, false}},
      {"hasIO", {NodeClass::Task, false}},
      {"hasNextTask", {NodeClass::Task, false}},
      {"hasRequirement", {NodeClass::Task, false}},
      {"hasChunkSize", {NodeClass::Task, true}},
      {"hasSliceSize", {NodeClass::Task, true}},
      {"hasRequiredTime", {NodeClass::Task, true}},
      {"hasMemoryReservation", {NodeClass::Task, true}},
      {"hasStorageMode", {NodeClass::Task, false}},
      {"hasInput", {NodeClass::IO, false}},
      {"hasOutput", {NodeClass::IO, false}},
      {"hasVolume", {NodeClass::Data, true}},
      {"hasNoRecords", {NodeClass::Data, true}},
      {"hasLocation", {NodeClass::Data, false}},
      {"hasComputing", {NodeClass::Requirement, true}},
      {"hasMemory", {NodeClass::Requirement, true}},
      {"hasStorage", {NodeClass::Requirement, true}},
      {"hasNetwork", {NodeClass::Requirement, true}},
  };
  return table;
}

std::string describe(const Triple& t) { return "(" + t.subject + ", " + t.property + ", ...)"; }

void set_once(std::optional<double>& slot, double value, const Triple& t) {
  if (slot) throw SchemaError("duplicate value for " + describe(t));
  slot = value;
}

}  // namespace

bool is_kg_class(std::string_view name) { return class_table().contains(name); }
bool is_kg_property(std::string_view name) { return property_table().contains(name); }

bool is_kg_reference(std::string_view property) {
  static const std::set<std::string, std::less<>> refs{"hasStartTask", "hasInputData", "hasLayer",
                                                       "hasTask",      "hasIO",        "hasNextTask",
                                                       "hasRequirement", "hasInput",   "hasOutput"};
  return refs.contains(property);
}

PipelineGraph from_triples(const std::vector<Triple>& triples) {
  PipelineGraph g;
  std::map<std::string, NodeClass, std::less<>> classes;
  std::map<std::string, std::size_t, std::less<>> index;
  bool have_pipeline = false;

  for (const auto& t : triples) {
    if (t.property != "type") continue;
    const auto* cls_name = std::get_if<std::string>(&t.object);
    if (cls_name == nullptr) throw SchemaError("class of " + t.subject + " must be a name");
    const auto it = class_table().find(*cls_name);
    if (it == class_table().end()) throw SchemaError("unknown class '" + *cls_name + "'");
    if (t.subject.empty()) throw SchemaError("empty node id");
    if (classes.contains(t.subject)) throw SchemaError("node '" + t.subject + "' declared twice");
    classes.emplace(t.subject, it->second);
    switch (it->second) {
      case NodeClass::Pipeline:
        if (have_pipeline) throw SchemaError("document declares more than one ETLPipeline");
        have_pipeline = true;
        g.id = t.subject;
        break;
      case NodeClass::Layer:
        index[t.subject] = g.layers.size();
        g.layers.push_back(Layer{t.subject, *cls_name == "Layer" ? "" : *cls_name, {}});
        break;
      case NodeClass::Task: {
        TaskNode node;
        node.id = t.subject;
        node.kind = *parse_task_kind(*cls_name);
        index[t.subject] = g.tasks.size();
        g.tasks.push_back(std::move(node));
        break;
      }
      case NodeClass::IO:
        index[t.subject] = g.io_handlers.size();
        g.io_handlers.push_back(IOHandler{t.subject, {}, {}});
        break;
      case NodeClass::Data:
        index[t.subject] = g.data_entities.size();
        g.data_entities.push_back(DataEntity{t.subject, {}, {}, {}});
        break;
      case NodeClass::Requirement:
        index[t.subject] = g.requirements.size();
        g.requirements.push_back(RequirementSet{t.subject});
        break;
    }
  }
  if (!have_pipeline) throw SchemaError("document declares no ETLPipeline");

  bool have_frequency = false;
  for (const auto& t : triples) {
    if (t.property == "type") continue;
    const auto prop = property_table().find(t.property);
    if (prop == property_table().end()) throw SchemaError("unknown property '" + t.property + "'");
    const auto cls = classes.find(t.subject);
    if (cls == classes.end()) throw SchemaError("property on undeclared node " + describe(t));
    if (cls->second != prop->second.owner) {
      throw SchemaError("property " + t.property + " does not apply to node " + t.subject);
    }
    const double* num = std::get_if<double>(&t.object);
    const std::string* sym = std::get_if<std::string>(&t.object);
    if (prop->second.numeric && num == nullptr) throw SchemaError("numeric value expected in " + describe(t));
    if (!prop->second.numeric && sym == nullptr) throw SchemaError("node id expected in " + describe(t));

    const std::string& p = t.property;
    switch (cls->second) {
      case NodeClass::Pipeline:
        if (p == "hasFrequency") {
          if (*sym == "frequent") g.frequency = FrequencyClass::Frequent;
          else if (*sym == "infrequent") g.frequency = FrequencyClass::Infrequent;
          else throw SchemaError("unknown frequency '" + *sym + "'");
          have_frequency = true;
        } else if (p == "dependsOn") {
          g.depends_on = *sym;
        } else if (p == "hasStartTask") {
          if (!g.start_task.empty()) throw SchemaError("pipeline has two start tasks");
          g.start_task = *sym;
        } else if (p == "hasInputData") {
          g.input_data.push_back(*sym);
        }
        break;
      case NodeClass::Layer:
        g.layers[index.at(t.subject)].tasks.push_back(*sym);
        break;
      case NodeClass::Task: {
        TaskNode& node = g.tasks[index.at(t.subject)];
        if (p == "hasIO") {
          if (!node.io.empty()) throw SchemaError("task " + node.id + " has two IO handlers");
          node.io = *sym;
        } else if (p == "hasNextTask") {
          node.next.push_back(*sym);
        } else if (p == "hasRequirement") {
          node.requirement = *sym;
        } else if (p == "hasChunkSize") {
          set_once(node.chunk_size, *num, t);
        } else if (p == "hasSliceSize") {
          set_once(node.slice_size, *num, t);
        } else if (p == "hasRequiredTime") {
          set_once(node.required_time, *num, t);
        } else if (p == "hasMemoryReservation") {
          set_once(node.memory_reservation, *num, t);
        } else if (p == "hasStorageMode") {
          node.storage_mode = parse_storage_mode(*sym);
        }
        break;
      }
      case NodeClass::IO: {
        IOHandler& h = g.io_handlers[index.at(t.subject)];
        (p == "hasInput" ? h.inputs : h.outputs).push_back(*sym);
        break;
      }
      case NodeClass::Data: {
        DataEntity& d = g.data_entities[index.at(t.subject)];
        if (p == "hasVolume") set_once(d.volume, *num, t);
        else if (p == "hasNoRecords") set_once(d.no_records, *num, t);
        else d.location = *sym;
        break;
      }
      case NodeClass::Requirement: {
        RequirementSet& r = g.requirements[index.at(t.subject)];
        if (p == "hasComputing") r.computing = *num;
        else if (p == "hasMemory") r.memory = *num;
        else if (p == "hasStorage") r.storage = *num;
        else r.network = *num;
        break;
      }
    }
  }
  if (!have_frequency) {
    g.frequency = g.tasks_of(TaskKind::Slice).empty() ? FrequencyClass::Infrequent : FrequencyClass::Frequent;
  }
  return g;
}

PipelineGraph apply_configuration(const PipelineGraph& graph, const ResourceConfiguration& config) {
  if (config.pipeline != graph.id) {
    throw InvalidGraph("configuration is for pipeline '" + config.pipeline + "', graph is '" + graph.id + "'");
  }
  PipelineGraph out = graph;
  bool have_slice = false;
  bool have_prepare = false;
  bool have_store = false;
  for (auto& t : out.tasks) {
    switch (t.kind) {
      case TaskKind::Slice:
        t.chunk_size = config.nc;
        t.slice_size = config.ns;
        t.memory_reservation = config.mrs;
        have_slice = true;
        break;
      case TaskKind::Prepare:
        t.memory_reservation = config.mrp;
        have_prepare = true;
        break;
      case TaskKind::Store:
        t.storage_mode = config.mode;
        have_store = true;
        break;
      case TaskKind::Retrieve:
        break;
    }
  }
  if (graph.frequency == FrequencyClass::Frequent && !have_slice) {
    throw MissingTask("frequent pipeline " + graph.id + " has no Slice task");
  }
  if (!have_prepare) throw MissingTask("pipeline " + graph.id + " has no Prepare task");
  if (!have_store) throw MissingTask("pipeline " + graph.id + " has no Store task");
  return out;
}

}  // namespace semcloud::kg
