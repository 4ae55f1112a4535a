#pragma once

#include <vector>

#include "semcloud/etl/ingest.hpp"
#include "semcloud/etl/schema.hpp"

namespace semcloud::etl {

struct MappingResult {
  std::vector<UnifiedRecord> records;
  std::vector<Reject> rejects;
};

/// Renames fields per the descriptor and converts values. Records without
/// a machine id or with unparsable numbers are rejected. A field with no
/// mapping throws MappingGap when `strict`, and is dropped otherwise.
MappingResult map_to_unified(const std::vector<RawRecord>& raw, const SourceDescriptor& descriptor,
                             const UnifiedSchema& schema, bool strict = true);

}  // namespace semcloud::etl
