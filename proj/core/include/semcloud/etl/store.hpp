#pragma once

#include <map>
#include <mutex>
#include <string>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/etl/reference.hpp"

namespace semcloud::etl {

struct StoreReceipt {
  StorageMode mode = StorageMode::Fast;
  std::size_t bytes = 0;
  std::size_t records = 0;
  std::string location;

  friend bool operator==(const StoreReceipt&, const StoreReceipt&) = default;
};

/// Serialized form written by the store (empty for an empty slice).
std::string serialize_prepared(const PreparedSlice& slice, const UnifiedSchema& schema);
PreparedSlice parse_prepared(std::string_view text, const UnifiedSchema& schema);

/// In-memory fast store with a byte capacity plus an unbounded cloud store.
class DataStore {
 public:
  /// `fast_capacity_mb` is typically c2 * nst.
  DataStore(UnifiedSchema schema, double fast_capacity_mb);

  /// Throws CapacityExceeded when a fast write would exceed the capacity.
  StoreReceipt store(const PreparedSlice& slice, StorageMode mode);
  /// Throws MissingReference for unknown locations.
  PreparedSlice read(const std::string& location) const;

  std::size_t used_bytes(StorageMode mode) const;
  std::size_t capacity_bytes() const noexcept { return capacity_; }

 private:
  UnifiedSchema schema_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> blobs_;
  std::size_t used_fast_ = 0;
  std::size_t used_cloud_ = 0;
};

}  // namespace semcloud::etl
