#include "semcloud/etl/reference.hpp"

#include <cmath>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::etl {

std::string format_reference_csv(const ReferenceSnapshot& snapshot) {
  csv::Table t;
  t.header = {"machine_id", "program_id", "production_line", "machine_type", "curve"};
  for (const auto& [key, row] : snapshot) {
    std::string curve;
    for (std::size_t i = 0; i < row.curve.size(); ++i) curve += (i ? ";" : "") + csv::number(row.curve[i]);
    t.rows.push_back({key.first, key.second, std::to_string(row.production_line), row.machine_type, curve});
  }
  return csv::format(t);
}

ReferenceSnapshot parse_reference_csv(std::string_view text) {
  const csv::Table t = csv::parse(text);
  if (t.header != csv::Row{"machine_id", "program_id", "production_line", "machine_type", "curve"}) {
    throw UnreadableSource("reference snapshot has an unexpected header");
  }
  ReferenceSnapshot out;
  for (const auto& row : t.rows) {
    if (row.size() != 5) throw UnreadableSource("reference snapshot row has the wrong field count");
    ReferenceRow r;
    r.production_line = static_cast<int>(csv::to_number(row[2]));
    r.machine_type = row[3];
    std::size_t pos = 0;
    while (pos < row[4].size()) {
      auto next = row[4].find(';', pos);
      if (next == std::string::npos) next = row[4].size();
      r.curve.push_back(csv::to_number(std::string_view(row[4]).substr(pos, next - pos)));
      pos = next + 1;
    }
    out[{row[0], row[1]}] = std::move(r);
  }
  return out;
}

ReferenceStore::ReferenceStore(ReferenceSnapshot snapshot)
    : snapshot_(std::make_shared<const ReferenceSnapshot>(std::move(snapshot))) {}

std::shared_ptr<const ReferenceSnapshot> ReferenceStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

void ReferenceStore::refresh(ReferenceSnapshot snapshot) {
  auto next = std::make_shared<const ReferenceSnapshot>(std::move(snapshot));
  std::lock_guard lock(mutex_);
  snapshot_ = std::move(next);
}

bool ReferenceStore::has_machine(const std::string& machine_id) const {
  const auto snap = snapshot();
  const auto it = snap->lower_bound({machine_id, std::string{}});
  return it != snap->end() && it->first.first == machine_id;
}

PreparedSlice prepare_slice(const Slice& slice, const ReferenceStore& reference) {
  const auto snap = reference.snapshot();  // one snapshot for the whole slice
  PreparedSlice out;
  out.machine_id = slice.machine_id;
  out.seq = slice.seq;
  for (const auto& r : slice.records) {
    const auto it = snap->find({r.machine_id, r.program_id});
    if (it == snap->end()) {
      throw MissingReference("no reference for machine " + r.machine_id + ", program " + r.program_id);
    }
    const ReferenceRow& row = it->second;
    double sum = 0;
    for (std::size_t i = 0; i < row.curve.size() && i < r.values.size(); ++i) {
      if (r.values[i]) sum += (*r.values[i] - row.curve[i]) * (*r.values[i] - row.curve[i]);
    }
    out.records.push_back(PreparedRecord{r, row.production_line, row.machine_type, std::sqrt(sum)});
  }
  return out;
}

}  // namespace semcloud::etl
