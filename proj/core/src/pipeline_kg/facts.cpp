#include "semcloud/pipeline_kg/facts.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semcloud/errors.hpp"
#include "semcloud/pipeline_kg/validate.hpp"

namespace semcloud::kg {

using datalog::FactSet;
using datalog::Value;

datalog::FactSet cloud_facts(const CloudAttributes& c) {
  check(c);
  FactSet facts;
  const Value id = Value::symbol(c.id);
  facts.insert("Cloud", {id});
  facts.insert("hasMemoryBufferCoefficient", {id, Value::number(c.c1)});
  facts.insert("hasStorageBufferCoefficient", {id, Value::number(c.c2)});
  facts.insert("hasMaxMemoryBufferCoefficient", {id, Value::number(c.c3)});
  facts.insert("hasNodeMemory", {id, Value::number(c.nm)});
  facts.insert("hasNodeStorage", {id, Value::number(c.nst)});
  facts.insert("hasFastStorage", {id, Value::symbol(c.fs)});
  facts.insert("hasCloudStorage", {id, Value::symbol(c.cs)});
  return facts;
}

namespace {

void fill_from_pilot(PipelineGraph& g, const PilotRunRecord& r) {
  for (auto& t : g.tasks) {
    switch (t.kind) {
      case TaskKind::Slice:
        if (!t.chunk_size) t.chunk_size = r.nc;
        if (!t.slice_size) t.slice_size = r.ns;
        if (!t.required_time) t.required_time = r.ts;
        if (!t.memory_reservation) t.memory_reservation = r.mrs;
        break;
      case TaskKind::Prepare:
        if (!t.required_time) t.required_time = r.tp;
        if (!t.memory_reservation) t.memory_reservation = r.mrp;
        break;
      case TaskKind::Store:
        if (!t.storage_mode) t.storage_mode = r.mode;
        break;
      case TaskKind::Retrieve:
        break;
    }
  }
  for (auto& d : g.data_entities) {
    if (std::find(g.input_data.begin(), g.input_data.end(), d.id) == g.input_data.end()) continue;
    if (!d.no_records) d.no_records = r.n;
    if (!d.volume) d.volume = r.v;
  }
}

Value object_value(const std::variant<std::string, double>& o) {
  if (const auto* s = std::get_if<std::string>(&o)) return Value::symbol(*s);
  return Value::number(std::get<double>(o));
}

}  // namespace

datalog::FactSet to_facts(const PipelineGraph& graph, const CloudAttributes& cloud,
                          const std::optional<PilotRunRecord>& pilot) {
  const ValidationReport report = validate(graph);
  if (!report.ok()) throw InvalidGraph("pipeline " + graph.id + " is invalid:\n" + report.to_string());

  PipelineGraph g = graph;
  if (pilot) fill_from_pilot(g, *pilot);

  FactSet facts = cloud_facts(cloud);
  for (const auto& t : to_triples(g)) {
    if (t.property == "type") {
      facts.insert(std::get<std::string>(t.object), {Value::symbol(t.subject)});
    } else {
      facts.insert(t.property, {Value::symbol(t.subject), object_value(t.object)});
    }
  }
  if (pilot) {
    const Value p = Value::symbol(g.id);
    facts.insert("hasEstSliceMemory", {p, Value::number(pilot->ms)});
    facts.insert("hasEstPrepareMemory", {p, Value::number(pilot->mp)});
    facts.insert("hasEstSliceStorage", {p, Value::number(pilot->ssl)});
    facts.insert("hasEstPrepareStorage", {p, Value::number(pilot->spr)});
    facts.insert("hasEstStoreStorage", {p, Value::number(pilot->sst)});
  }
  return facts;
}

std::vector<std::string> pipelines_in(const datalog::FactSet& facts) {
  std::vector<std::string> out;
  for (const auto& t : datalog::query(facts, "ETLPipeline", 1)) {
    if (t[0].is_symbol()) out.push_back(t[0].as_symbol());
  }
  return out;
}

PipelineGraph from_facts(const datalog::FactSet& facts, std::string_view id) {
  std::map<std::string, std::string> class_of;
  std::map<std::string, std::vector<std::pair<std::string, Value>>> props;
  for (const auto& [key, relation] : facts.relations()) {
    if (key.arity == 1 && is_kg_class(key.name)) {
      for (const auto& t : relation) {
        if (t[0].is_symbol()) class_of[t[0].as_symbol()] = key.name;
      }
    } else if (key.arity == 2 && is_kg_property(key.name)) {
      for (const auto& t : relation) {
        if (t[0].is_symbol()) props[t[0].as_symbol()].emplace_back(key.name, t[1]);
      }
    }
  }
  const std::string root(id);
  if (class_of[root] != "ETLPipeline") throw InvalidGraph("no ETLPipeline '" + root + "' in facts");

  std::set<std::string> reached{root};
  std::vector<std::string> frontier{root};
  while (!frontier.empty()) {
    const std::string node = frontier.back();
    frontier.pop_back();
    for (const auto& [prop, value] : props[node]) {
      if (!is_kg_reference(prop) || !value.is_symbol()) continue;
      if (reached.insert(value.as_symbol()).second) frontier.push_back(value.as_symbol());
    }
  }

  std::vector<Triple> triples;
  for (const auto& node : reached) {
    if (auto it = class_of.find(node); it != class_of.end()) triples.push_back(Triple{node, "type", it->second});
  }
  for (const auto& node : reached) {
    for (const auto& [prop, value] : props[node]) {
      std::variant<std::string, double> object;
      if (value.is_symbol()) object = value.as_symbol();
      else object = value.as_number();
      triples.push_back(Triple{node, prop, object});
    }
  }
  return from_triples(triples);
}

PipelineGraph canonical(PipelineGraph g) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(g.input_data.begin(), g.input_data.end());
  std::sort(g.layers.begin(), g.layers.end(), by_id);
  for (auto& l : g.layers) std::sort(l.tasks.begin(), l.tasks.end());
  std::sort(g.tasks.begin(), g.tasks.end(), by_id);
  for (auto& t : g.tasks) std::sort(t.next.begin(), t.next.end());
  std::sort(g.io_handlers.begin(), g.io_handlers.end(), by_id);
  for (auto& h : g.io_handlers) {
    std::sort(h.inputs.begin(), h.inputs.end());
    std::sort(h.outputs.begin(), h.outputs.end());
  }
  std::sort(g.data_entities.begin(), g.data_entities.end(), by_id);
  std::sort(g.requirements.begin(), g.requirements.end(), by_id);
  return g;
}

}  // namespace semcloud::kg
