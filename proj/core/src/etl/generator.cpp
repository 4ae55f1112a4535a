#include "semcloud/etl/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"
#include "semcloud/etl/ingest.hpp"

namespace semcloud::etl {

void WorkloadSpec::check() const {
  if (production_lines < 1) throw ConfigError("workload needs at least one production line");
  if (machines < production_lines) throw ConfigError("workload needs machines >= production lines");
  if (!(duration >= 0) || !(rate >= 0)) throw ConfigError("duration and rate must be non-negative");
  if (!(record_bytes > 0)) throw ConfigError("record_bytes must be positive");
  if (formats.empty()) throw ConfigError("workload needs at least one source format");
  if (absent_per_source * formats.size() > attributes) {
    throw ConfigError("too many absent attributes for the attribute count");
  }
  if (programs < 1) throw ConfigError("workload needs at least one welding program");
}

std::size_t WorkloadSpec::records_per_machine() const {
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
}

std::string machine_name(int machine) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "M%02d", machine + 1);
  return buf;
}

int production_line_of(int machine, int production_lines) { return machine % production_lines + 1; }

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double round4(double x) { return std::round(x * 1e4) / 1e4; }

std::string program_name(int p) { return "P" + std::to_string(p + 1); }

// Per-source field naming.
std::string source_name(const std::string& property, std::size_t k) {
  if (k == 0) return property;
  if (k == 1) {
    std::string out;
    bool upper = false;
    for (char c : property) {
      if (c == '_') {
        upper = true;
      } else {
        out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
        upper = false;
      }
    }
    return out;
  }
  if (k == 2) {
    std::string out = "WLD_";
    for (char c : property) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  return "s" + std::to_string(k) + "_" + property;
}

double attribute_base(std::size_t attribute, int machine, int program) {
  return 10.0 + 5.0 * static_cast<double>(attribute) + 0.1 * machine + 0.5 * program;
}

}  // namespace

Workload generate_workload(const WorkloadSpec& spec) {
  spec.check();
  Workload w;
  w.schema = UnifiedSchema::desk(spec.attributes);
  std::mt19937_64 rng(spec.seed);

  const std::size_t per_machine = spec.records_per_machine();
  for (std::size_t t = 0; t < per_machine; ++t) {
    for (int m = 0; m < spec.machines; ++m) {
      UnifiedRecord r;
      r.machine_id = machine_name(m);
      const int program = static_cast<int>((static_cast<std::size_t>(m) + t / 10) % static_cast<std::size_t>(spec.programs));
      r.program_id = program_name(program);
      r.timestamp = static_cast<double>(t) / spec.rate;
      r.record_bytes = spec.record_bytes;
      for (std::size_t j = 0; j < spec.attributes; ++j) {
        const double u = uniform01(rng) * 2.0 - 1.0;
        r.values.push_back(round4(attribute_base(j, m, program) * (1.0 + 0.05 * u)));
      }
      w.records.push_back(std::move(r));
    }
  }

  const std::size_t curve_length = std::min<std::size_t>(8, spec.attributes);
  for (int m = 0; m < spec.machines; ++m) {
    for (int p = 0; p < spec.programs; ++p) {
      ReferenceRow row;
      row.production_line = production_line_of(m, spec.production_lines);
      row.machine_type = std::string("type-") + static_cast<char>('A' + m % 3);
      for (std::size_t j = 0; j < curve_length; ++j) row.curve.push_back(attribute_base(j, m, p));
      w.reference[{machine_name(m), program_name(p)}] = std::move(row);
    }
  }

  const std::size_t K = spec.formats.size();
  const auto properties = w.schema.properties();
  const auto keys = key_properties().size();
  for (std::size_t k = 0; k < K; ++k) {
    SourceDescriptor d;
    d.format = spec.formats[k];
    d.name = "source" + std::to_string(k + 1) + "_" + std::string(to_string(d.format));
    d.location = d.name + "." + std::string(to_string(d.format));
    for (std::size_t j = 0, taken = 0; j < spec.attributes && taken < spec.absent_per_source; ++j) {
      if (j % K == k) {
        d.absent.push_back(w.schema.attributes[j]);
        ++taken;
      }
    }
    std::vector<std::string> fields;
    std::vector<std::size_t> columns;  // property index per field
    for (std::size_t p = 0; p < properties.size(); ++p) {
      if (std::find(d.absent.begin(), d.absent.end(), properties[p]) != d.absent.end()) continue;
      const std::string field = source_name(properties[p], k);
      d.field_mapping[field] = properties[p];
      fields.push_back(field);
      columns.push_back(p);
    }

    std::vector<RawRecord> raw;
    raw.reserve(w.records.size());
    for (const auto& r : w.records) {
      RawRecord row;
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const std::size_t p = columns[f];
        std::string value;
        if (p == 0) value = r.machine_id;
        else if (p == 1) value = r.program_id;
        else if (p == 2) value = csv::number(r.timestamp);
        else if (p == 3) value = csv::number(r.record_bytes);
        else value = csv::number(*r.values[p - keys]);
        row[fields[f]] = std::move(value);
      }
      raw.push_back(std::move(row));
    }
    w.sources.push_back(GeneratedSource{d, write_source(d.format, fields, raw)});
  }
  return w;
}

}  // namespace semcloud::etl
