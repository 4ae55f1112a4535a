#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "semcloud/etl/slicing.hpp"

namespace semcloud::etl {

/// Infrequent-stream result for one (machine, program): metadata plus a
/// reference curve over the first payload attributes.
struct ReferenceRow {
  int production_line = 0;
  std::string machine_type;
  std::vector<double> curve;

  friend bool operator==(const ReferenceRow&, const ReferenceRow&) = default;
};

using ReferenceKey = std::pair<std::string, std::string>;  // machine_id, program_id
using ReferenceSnapshot = std::map<ReferenceKey, ReferenceRow>;

std::string format_reference_csv(const ReferenceSnapshot& snapshot);
/// Throws UnreadableSource.
ReferenceSnapshot parse_reference_csv(std::string_view text);

/// Readers always see a whole snapshot; refresh swaps it atomically.
class ReferenceStore {
 public:
  ReferenceStore() : snapshot_(std::make_shared<const ReferenceSnapshot>()) {}
  explicit ReferenceStore(ReferenceSnapshot snapshot);

  std::shared_ptr<const ReferenceSnapshot> snapshot() const;
  void refresh(ReferenceSnapshot snapshot);
  bool has_machine(const std::string& machine_id) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const ReferenceSnapshot> snapshot_;
};

struct PreparedRecord {
  UnifiedRecord record;
  int production_line = 0;
  std::string machine_type;
  double curve_distance = 0;  // Euclidean, over non-null attributes covered by the curve

  friend bool operator==(const PreparedRecord&, const PreparedRecord&) = default;
};

struct PreparedSlice {
  std::string machine_id;
  std::size_t seq = 0;
  std::vector<PreparedRecord> records;

  friend bool operator==(const PreparedSlice&, const PreparedSlice&) = default;
};

/// Keyed lookup join on (machine, program). Throws MissingReference when the
/// slice's machine has no reference row for a record's program.
PreparedSlice prepare_slice(const Slice& slice, const ReferenceStore& reference);

}  // namespace semcloud::etl
