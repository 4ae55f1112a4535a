#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semcloud {

enum class StorageMode { Fast, Cloud };

std::string_view to_string(StorageMode mode);
/// Accepts "fast" / "cloud"; throws SchemaError otherwise.
StorageMode parse_storage_mode(std::string_view text);

enum class RunKind { Estimation, Configuration };

std::string_view to_string(RunKind kind);
RunKind parse_run_kind(std::string_view text);

/// One observed execution of a pipeline. Memory and storage in MB, times in
/// seconds, cpu_integral in millicore-seconds.
struct PilotRunRecord {
  std::string p;
  double n = 0;
  double v = 0;
  double nc = 0;
  double ns = 0;
  double ts = 0;
  double tp = 0;
  double ms = 0;
  double mp = 0;
  double ssl = 0;
  double spr = 0;
  double sst = 0;
  double mrs = 0;
  double mrp = 0;
  StorageMode mode = StorageMode::Fast;
  double total_time = 0;
  double cpu_integral = 0;
  RunKind kind = RunKind::Estimation;

  friend bool operator==(const PilotRunRecord&, const PilotRunRecord&) = default;
};

/// Column names in file order.
const std::vector<std::string>& pilot_columns();

/// Returns an empty string when the record satisfies its invariants,
/// otherwise a description of the first violation.
std::string check_invariants(const PilotRunRecord& record);

/// Numeric value of a named column (e.g. "ms", "total_time").
double field(const PilotRunRecord& record, std::string_view name);

/// Pilot statistics files: CSV with the header of pilot_columns() and an
/// optional leading "# seed=..." comment.
void write_pilot_csv(const std::string& path, const std::vector<PilotRunRecord>& records,
                     std::optional<std::uint64_t> seed = std::nullopt);
std::vector<PilotRunRecord> read_pilot_csv(const std::string& path);
std::string format_pilot_csv(const std::vector<PilotRunRecord>& records,
                             std::optional<std::uint64_t> seed = std::nullopt);
std::vector<PilotRunRecord> parse_pilot_csv(std::string_view text);

}  // namespace semcloud
