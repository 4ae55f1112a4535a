#include "semcloud/pipeline_kg/document.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "semcloud/errors.hpp"
#include "semcloud/pipeline_kg/validate.hpp"

namespace semcloud::kg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::variant<std::string, double> object_of(const json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return value.get<double>();
  throw SchemaError(where + ": expected a string or number");
}

void node_triples(const json& node, const std::string& section, const std::string& default_type,
                  std::vector<Triple>& out) {
  if (!node.is_object()) throw SchemaError(section + ": entries must be objects");
  if (!node.contains("id") || !node["id"].is_string()) throw SchemaError(section + ": entry without string id");
  const std::string id = node["id"].get<std::string>();
  std::string type = default_type;
  if (node.contains("type")) {
    if (!node["type"].is_string()) throw SchemaError(id + ": type must be a string");
    type = node["type"].get<std::string>();
  }
  if (type.empty()) throw SchemaError(id + ": missing type");
  out.push_back(Triple{id, "type", type});
  for (const auto& [key, value] : node.items()) {
    if (key == "id" || key == "type") continue;
    const std::string where = id + "." + key;
    if (value.is_array()) {
      for (const auto& v : value) out.push_back(Triple{id, key, object_of(v, where)});
    } else {
      out.push_back(Triple{id, key, object_of(value, where)});
    }
  }
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("pipeline document is not valid JSON: ") + e.what());
  }
}

}  // namespace

std::vector<Triple> parse_document_triples(std::string_view document) {
  const json doc = parse_json(document);
  if (!doc.is_object()) throw SchemaError("pipeline document must be a JSON object");
  if (!doc.contains("format") || doc["format"] != kPipelineFormat) {
    throw SchemaError("pipeline document must declare format " + std::string(kPipelineFormat));
  }

  std::vector<Triple> out;
  if (doc.contains("triples")) {
    for (const auto& [key, value] : doc.items()) {
      if (key != "format" && key != "triples") throw SchemaError("unexpected key '" + key + "' in triple form");
    }
    for (const auto& t : doc["triples"]) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_string()) {
        throw SchemaError("triples must be [subject, property, object]");
      }
      out.push_back(Triple{t[0].get<std::string>(), t[1].get<std::string>(), object_of(t[2], "triple object")});
    }
    return out;
  }

  static const std::vector<std::pair<std::string, std::string>> sections{
      {"ETLPipeline", "ETLPipeline"}, {"Layer", "Layer"},           {"Task", ""},
      {"IOHandler", "IOHandler"},     {"DataEntity", "DataEntity"}, {"Requirement", "Requirement"},
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "format") continue;
    const bool known = std::any_of(sections.begin(), sections.end(), [&](const auto& s) { return s.first == key; });
    if (!known) throw SchemaError("unknown class '" + key + "'");
  }
  for (const auto& [section, default_type] : sections) {
    if (!doc.contains(section)) continue;
    const json& value = doc[section];
    if (section == "ETLPipeline") {
      node_triples(value, section, default_type, out);
      continue;
    }
    if (!value.is_array()) throw SchemaError(section + " must be a list");
    for (const auto& node : value) node_triples(node, section, default_type, out);
  }
  return out;
}

PipelineGraph parse_pipeline(std::string_view document) {
  PipelineGraph graph = from_triples(parse_document_triples(document));
  throw_if_invalid(validate(graph));
  return graph;
}

std::string serialize_pipeline(const PipelineGraph& g) {
  ordered_json doc;
  doc["format"] = kPipelineFormat;

  ordered_json p;
  p["id"] = g.id;
  p["hasFrequency"] = to_string(g.frequency);
  if (g.depends_on) p["dependsOn"] = *g.depends_on;
  if (!g.start_task.empty()) p["hasStartTask"] = g.start_task;
  p["hasInputData"] = g.input_data;
  ordered_json layer_ids = ordered_json::array();
  for (const auto& l : g.layers) layer_ids.push_back(l.id);
  p["hasLayer"] = layer_ids;
  doc["ETLPipeline"] = p;

  ordered_json layers = ordered_json::array();
  for (const auto& l : g.layers) {
    ordered_json j;
    j["id"] = l.id;
    j["type"] = l.type.empty() ? "Layer" : l.type;
    j["hasTask"] = l.tasks;
    layers.push_back(j);
  }
  doc["Layer"] = layers;

  ordered_json tasks = ordered_json::array();
  for (const auto& t : g.tasks) {
    ordered_json j;
    j["id"] = t.id;
    j["type"] = to_string(t.kind);
    if (!t.io.empty()) j["hasIO"] = t.io;
    if (!t.next.empty()) j["hasNextTask"] = t.next;
    if (t.requirement) j["hasRequirement"] = *t.requirement;
    if (t.chunk_size) j["hasChunkSize"] = *t.chunk_size;
    if (t.slice_size) j["hasSliceSize"] = *t.slice_size;
    if (t.required_time) j["hasRequiredTime"] = *t.required_time;
    if (t.memory_reservation) j["hasMemoryReservation"] = *t.memory_reservation;
    if (t.storage_mode) j["hasStorageMode"] = to_string(*t.storage_mode);
    tasks.push_back(j);
  }
  doc["Task"] = tasks;

  ordered_json handlers = ordered_json::array();
  for (const auto& h : g.io_handlers) {
    ordered_json j;
    j["id"] = h.id;
    if (!h.inputs.empty()) j["hasInput"] = h.inputs;
    if (!h.outputs.empty()) j["hasOutput"] = h.outputs;
    handlers.push_back(j);
  }
  doc["IOHandler"] = handlers;

  ordered_json data = ordered_json::array();
  for (const auto& d : g.data_entities) {
    ordered_json j;
    j["id"] = d.id;
    if (d.volume) j["hasVolume"] = *d.volume;
    if (d.no_records) j["hasNoRecords"] = *d.no_records;
    if (d.location) j["hasLocation"] = *d.location;
    data.push_back(j);
  }
  doc["DataEntity"] = data;

  if (!g.requirements.empty()) {
    ordered_json reqs = ordered_json::array();
    for (const auto& r : g.requirements) {
      ordered_json j;
      j["id"] = r.id;
      j["hasComputing"] = r.computing;
      j["hasMemory"] = r.memory;
      j["hasStorage"] = r.storage;
      j["hasNetwork"] = r.network;
      reqs.push_back(j);
    }
    doc["Requirement"] = reqs;
  }
  return doc.dump(2) + "\n";
}

std::string serialize_pipeline_triples(const PipelineGraph& graph) {
  ordered_json doc;
  doc["format"] = kPipelineFormat;
  ordered_json triples = ordered_json::array();
  for (const auto& t : to_triples(graph)) {
    ordered_json row = ordered_json::array({t.subject, t.property});
    std::visit([&](const auto& o) { row.push_back(o); }, t.object);
    triples.push_back(row);
  }
  doc["triples"] = triples;
  return doc.dump(2) + "\n";
}

PipelineGraph load_pipeline(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pipeline " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_pipeline(buffer.str());
}

void save_pipeline(const std::string& path, const PipelineGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write pipeline " + path);
  out << serialize_pipeline(graph);
}

}  // namespace semcloud::kg
