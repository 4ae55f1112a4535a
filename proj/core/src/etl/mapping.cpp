#include "semcloud/etl/mapping.hpp"

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::etl {

MappingResult map_to_unified(const std::vector<RawRecord>& raw, const SourceDescriptor& descriptor,
                             const UnifiedSchema& schema, bool strict) {
  descriptor.check(schema);
  MappingResult out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    UnifiedRecord r;
    r.values.assign(schema.attributes.size(), std::nullopt);
    std::string problem;
    for (const auto& [field, text] : raw[i]) {
      const auto m = descriptor.field_mapping.find(field);
      if (m == descriptor.field_mapping.end()) {
        if (strict) throw MappingGap(descriptor.name + ": field '" + field + "' has no mapping");
        continue;
      }
      const std::string& property = m->second;
      try {
        if (property == "machine_id") r.machine_id = text;
        else if (property == "program_id") r.program_id = text;
        else if (property == "timestamp") r.timestamp = csv::to_number(text);
        else if (property == "record_bytes") r.record_bytes = csv::to_number(text);
        else r.values[*schema.index(property)] = csv::to_number(text);
      } catch (const UnreadableSource& e) {
        problem = field + ": " + e.what();
      }
    }
    if (problem.empty() && r.machine_id.empty()) problem = "missing machine id";
    if (!problem.empty()) {
      out.rejects.push_back({i, problem});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace semcloud::etl
