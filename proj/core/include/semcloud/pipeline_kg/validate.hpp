#pragma once

#include <string>
#include <vector>

#include "semcloud/pipeline_kg/graph.hpp"

namespace semcloud::kg {

struct Violation {
  std::string rule;                // e.g. "single-root", "cycle", "volume"
  std::vector<std::string> nodes;  // offending node ids
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view rule) const;
  /// One line per violation.
  std::string to_string() const;
};

/// Checks every structural and value invariant of the graph. Violations are
/// data; this never throws.
ValidationReport validate(const PipelineGraph& graph);

/// Throws CycleError if the report contains a cycle, otherwise StructureError
/// if it is not ok.
void throw_if_invalid(const ValidationReport& report);

}  // namespace semcloud::kg
