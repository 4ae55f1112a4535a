#include "semcloud/etl/store.hpp"

#include <cmath>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::etl {

std::string serialize_prepared(const PreparedSlice& slice, const UnifiedSchema& schema) {
  if (slice.records.empty()) return {};
  csv::Table t;
  t.comments = {"machine=" + slice.machine_id, "seq=" + std::to_string(slice.seq)};
  t.header = schema.properties();
  t.header.insert(t.header.end(), {"production_line", "machine_type", "curve_distance"});
  for (const auto& p : slice.records) {
    const auto& r = p.record;
    csv::Row row{r.machine_id, r.program_id, csv::number(r.timestamp), csv::number(r.record_bytes)};
    for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
      row.push_back(i < r.values.size() && r.values[i] ? csv::number(*r.values[i]) : std::string{});
    }
    row.push_back(std::to_string(p.production_line));
    row.push_back(p.machine_type);
    row.push_back(csv::number(p.curve_distance));
    t.rows.push_back(std::move(row));
  }
  return csv::format(t);
}

PreparedSlice parse_prepared(std::string_view text, const UnifiedSchema& schema) {
  PreparedSlice out;
  if (text.empty()) return out;
  const csv::Table t = csv::parse(text);
  for (const auto& c : t.comments) {
    if (c.rfind("machine=", 0) == 0) out.machine_id = c.substr(8);
    if (c.rfind("seq=", 0) == 0) out.seq = static_cast<std::size_t>(csv::to_number(c.substr(4)));
  }
  const std::size_t width = schema.properties().size();
  for (const auto& row : t.rows) {
    if (row.size() != width + 3) throw UnreadableSource("stored slice row has the wrong field count");
    PreparedRecord p;
    p.record.machine_id = row[0];
    p.record.program_id = row[1];
    p.record.timestamp = csv::to_number(row[2]);
    p.record.record_bytes = csv::to_number(row[3]);
    for (std::size_t i = 4; i < width; ++i) {
      p.record.values.push_back(row[i].empty() ? std::nullopt : std::optional<double>(csv::to_number(row[i])));
    }
    p.production_line = static_cast<int>(csv::to_number(row[width]));
    p.machine_type = row[width + 1];
    p.curve_distance = csv::to_number(row[width + 2]);
    out.records.push_back(std::move(p));
  }
  return out;
}

DataStore::DataStore(UnifiedSchema schema, double fast_capacity_mb)
    : schema_(std::move(schema)),
      capacity_(static_cast<std::size_t>(std::max(0.0, std::floor(fast_capacity_mb * 1e6)))) {}

StoreReceipt DataStore::store(const PreparedSlice& slice, StorageMode mode) {
  std::string blob = serialize_prepared(slice, schema_);
  std::lock_guard lock(mutex_);
  if (mode == StorageMode::Fast && used_fast_ + blob.size() > capacity_) {
    throw CapacityExceeded("fast store holds " + std::to_string(used_fast_) + " of " + std::to_string(capacity_) +
                           " bytes; slice needs " + std::to_string(blob.size()));
  }
  StoreReceipt receipt;
  receipt.mode = mode;
  receipt.bytes = blob.size();
  receipt.records = slice.records.size();
  receipt.location = std::string(to_string(mode)) + "/" + slice.machine_id + "/" + std::to_string(slice.seq);
  (mode == StorageMode::Fast ? used_fast_ : used_cloud_) += blob.size();
  blobs_[receipt.location] = std::move(blob);
  return receipt;
}

PreparedSlice DataStore::read(const std::string& location) const {
  std::lock_guard lock(mutex_);
  const auto it = blobs_.find(location);
  if (it == blobs_.end()) throw MissingReference("nothing stored at " + location);
  PreparedSlice s = parse_prepared(it->second, schema_);
  if (s.records.empty()) {
    // Empty blobs carry no header; recover identity from the location.
    const auto a = location.find('/');
    const auto b = location.rfind('/');
    s.machine_id = location.substr(a + 1, b - a - 1);
    s.seq = static_cast<std::size_t>(std::stoul(location.substr(b + 1)));
  }
  return s;
}

std::size_t DataStore::used_bytes(StorageMode mode) const {
  std::lock_guard lock(mutex_);
  return mode == StorageMode::Fast ? used_fast_ : used_cloud_;
}

}  // namespace semcloud::etl
