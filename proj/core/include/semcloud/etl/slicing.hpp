#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semcloud/etl/schema.hpp"

namespace semcloud::etl {

struct Slice {
  std::string machine_id;
  std::size_t seq = 0;
  std::vector<UnifiedRecord> records;

  friend bool operator==(const Slice&, const Slice&) = default;
};

/// Reads `nc` records at a time; within a chunk, records are grouped by
/// machine (first appearance order) and cut into slices of at most `ns`.
/// Throws InvalidInput unless 1 <= ns <= nc.
std::vector<Slice> slice_records(const std::vector<UnifiedRecord>& records, std::size_t nc, std::size_t ns);

}  // namespace semcloud::etl
