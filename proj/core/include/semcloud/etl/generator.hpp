#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semcloud/etl/reference.hpp"
#include "semcloud/etl/schema.hpp"

namespace semcloud::etl {

struct WorkloadSpec {
  int production_lines = 3;
  int machines = 45;
  double duration = 60;       // s
  double rate = 1;            // records/s per machine
  double record_bytes = 1250; // bytes
  std::size_t attributes = 26;
  std::vector<SourceFormat> formats{SourceFormat::CSV, SourceFormat::JSON, SourceFormat::XML};
  std::size_t absent_per_source = 2;
  int programs = 3;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void check() const;
  /// floor(duration * rate) records per machine.
  std::size_t records_per_machine() const;
};

struct GeneratedSource {
  SourceDescriptor descriptor;
  std::string content;
};

struct Workload {
  UnifiedSchema schema;
  /// Ground truth in stream order: time-major, machines interleaved.
  std::vector<UnifiedRecord> records;
  std::vector<GeneratedSource> sources;
  ReferenceSnapshot reference;
};

/// Deterministic given the spec. Every source describes all records, under
/// its own field names and without its absent attributes.
Workload generate_workload(const WorkloadSpec& spec);

/// "M01".. and line of a machine (machines are dealt round-robin to lines).
std::string machine_name(int machine);
int production_line_of(int machine, int production_lines);

}  // namespace semcloud::etl
