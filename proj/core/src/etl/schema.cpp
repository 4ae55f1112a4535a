#include "semcloud/etl/schema.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>
#include <set>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::etl {

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::CSV: return "csv";
    case SourceFormat::JSON: return "json";
    case SourceFormat::XML: return "xml";
  }
  return "?";
}

SourceFormat parse_source_format(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "csv") return SourceFormat::CSV;
  if (lower == "json") return SourceFormat::JSON;
  if (lower == "xml") return SourceFormat::XML;
  throw ConfigError("unknown source format '" + std::string(text) + "'");
}

UnifiedSchema UnifiedSchema::desk(std::size_t count) {
  static const std::vector<std::string> vocabulary{
      "current",        "voltage",         "resistance",    "electrode_force", "weld_time",
      "energy",         "power",           "squeeze_time",  "hold_time",       "cool_time",
      "electrode_wear", "tip_dress_count", "spot_diameter", "sheet_thickness", "gap",
      "pulse_count",    "current_ramp",    "voltage_drop",  "resistance_slope", "temperature",
      "displacement",   "expulsion_index", "stepper_count", "cap_age",         "quality_score",
      "process_deviation"};
  UnifiedSchema s;
  for (std::size_t i = 0; i < count; ++i) {
    s.attributes.push_back(i < vocabulary.size() ? vocabulary[i] : "attribute_" + std::to_string(i + 1));
  }
  return s;
}

std::optional<std::size_t> UnifiedSchema::index(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == attribute) return i;
  }
  return std::nullopt;
}

bool UnifiedSchema::has_property(std::string_view name) const {
  const auto& keys = key_properties();
  return std::find(keys.begin(), keys.end(), name) != keys.end() || index(name).has_value();
}

std::vector<std::string> UnifiedSchema::properties() const {
  std::vector<std::string> out = key_properties();
  out.insert(out.end(), attributes.begin(), attributes.end());
  return out;
}

UnifiedRecord without(const UnifiedRecord& record, const UnifiedSchema& schema, const std::vector<std::string>& attributes) {
  UnifiedRecord r = record;
  for (const auto& a : attributes) {
    if (auto i = schema.index(a); i && *i < r.values.size()) r.values[*i].reset();
  }
  return r;
}

void SourceDescriptor::check(const UnifiedSchema& schema) const {
  std::set<std::string> targets;
  for (const auto& [field, property] : field_mapping) {
    if (!schema.has_property(property)) {
      throw MappingGap(name + ": field '" + field + "' maps to unknown property '" + property + "'");
    }
    if (!targets.insert(property).second) {
      throw MappingGap(name + ": property '" + property + "' is mapped twice");
    }
  }
  const auto& keys = key_properties();
  for (const auto& a : absent) {
    if (std::find(keys.begin(), keys.end(), a) != keys.end()) {
      throw MappingGap(name + ": key property '" + a + "' cannot be absent");
    }
    if (targets.count(a)) throw MappingGap(name + ": property '" + a + "' is both mapped and absent");
  }
  for (const auto& p : schema.properties()) {
    if (!targets.count(p) && std::find(absent.begin(), absent.end(), p) == absent.end()) {
      throw MappingGap(name + ": property '" + p + "' is neither mapped nor declared absent");
    }
  }
}

std::string serialize_descriptor(const SourceDescriptor& d) {
  nlohmann::ordered_json j;
  j["name"] = d.name;
  j["format"] = to_string(d.format);
  j["location"] = d.location;
  nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
  for (const auto& [field, property] : d.field_mapping) mapping[field] = property;
  j["field_mapping"] = mapping;
  j["absent"] = d.absent;
  return j.dump(2) + "\n";
}

SourceDescriptor parse_descriptor(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text.begin(), text.end());
    SourceDescriptor d;
    d.name = j.at("name").get<std::string>();
    d.format = parse_source_format(j.at("format").get<std::string>());
    d.location = j.value("location", std::string{});
    d.field_mapping = j.at("field_mapping").get<std::map<std::string, std::string>>();
    d.absent = j.value("absent", std::vector<std::string>{});
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("source descriptor: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("source descriptor: ") + e.what());
  }
}

std::string format_unified_csv(const std::vector<UnifiedRecord>& records, const UnifiedSchema& schema) {
  csv::Table t;
  t.header = schema.properties();
  for (const auto& r : records) {
    csv::Row row{r.machine_id, r.program_id, csv::number(r.timestamp), csv::number(r.record_bytes)};
    for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
      row.push_back(i < r.values.size() && r.values[i] ? csv::number(*r.values[i]) : std::string{});
    }
    t.rows.push_back(std::move(row));
  }
  return csv::format(t);
}

std::vector<UnifiedRecord> parse_unified_csv(std::string_view text, const UnifiedSchema& schema) {
  const csv::Table t = csv::parse(text);
  if (t.header != schema.properties()) throw UnreadableSource("unified file header does not match the schema");
  std::vector<UnifiedRecord> out;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw UnreadableSource("unified file row has the wrong field count");
    UnifiedRecord r;
    r.machine_id = row[0];
    r.program_id = row[1];
    r.timestamp = csv::to_number(row[2]);
    r.record_bytes = csv::to_number(row[3]);
    for (std::size_t i = 4; i < row.size(); ++i) {
      r.values.push_back(row[i].empty() ? std::nullopt : std::optional<double>(csv::to_number(row[i])));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace semcloud::etl
