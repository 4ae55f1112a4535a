#include "semcloud/common/pilot_record.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud {

std::string_view to_string(StorageMode mode) { return mode == StorageMode::Fast ? "fast" : "cloud"; }

StorageMode parse_storage_mode(std::string_view text) {
  if (text == "fast") return StorageMode::Fast;
  if (text == "cloud") return StorageMode::Cloud;
  throw SchemaError("unknown storage mode '" + std::string(text) + "'");
}

std::string_view to_string(RunKind kind) { return kind == RunKind::Estimation ? "estimation" : "configuration"; }

RunKind parse_run_kind(std::string_view text) {
  if (text == "estimation") return RunKind::Estimation;
  if (text == "configuration") return RunKind::Configuration;
  throw SchemaError("unknown run kind '" + std::string(text) + "'");
}

const std::vector<std::string>& pilot_columns() {
  static const std::vector<std::string> columns{
      "p",   "n",   "v",   "nc",   "ns",         "ts",           "tp",  "ms",  "mp",
      "ssl", "spr", "sst", "mrs", "mrp", "mode", "total_time", "cpu_integral", "kind"};
  return columns;
}

namespace {

double* numeric(PilotRunRecord& r, std::string_view name) {
  if (name == "n") return &r.n;
  if (name == "v") return &r.v;
  if (name == "nc") return &r.nc;
  if (name == "ns") return &r.ns;
  if (name == "ts") return &r.ts;
  if (name == "tp") return &r.tp;
  if (name == "ms") return &r.ms;
  if (name == "mp") return &r.mp;
  if (name == "ssl") return &r.ssl;
  if (name == "spr") return &r.spr;
  if (name == "sst") return &r.sst;
  if (name == "mrs") return &r.mrs;
  if (name == "mrp") return &r.mrp;
  if (name == "total_time") return &r.total_time;
  if (name == "cpu_integral") return &r.cpu_integral;
  return nullptr;
}

}  // namespace

double field(const PilotRunRecord& record, std::string_view name) {
  auto* p = numeric(const_cast<PilotRunRecord&>(record), name);
  if (p == nullptr) throw SchemaError("no numeric pilot field '" + std::string(name) + "'");
  return *p;
}

std::string check_invariants(const PilotRunRecord& r) {
  for (const auto& name : pilot_columns()) {
    auto* p = numeric(const_cast<PilotRunRecord&>(r), name);
    if (p == nullptr) continue;
    if (!std::isfinite(*p)) return name + " is not finite";
    if (*p < 0) return name + " is negative";
  }
  if (r.kind == RunKind::Configuration && !(r.ns <= r.nc && r.nc <= r.n)) {
    return "configuration run needs ns <= nc <= n";
  }
  if (r.total_time < std::max(r.ts, r.tp)) return "total_time below max(ts, tp)";
  return {};
}

std::string format_pilot_csv(const std::vector<PilotRunRecord>& records, std::optional<std::uint64_t> seed) {
  csv::Table table;
  if (seed) table.comments.push_back("seed=" + std::to_string(*seed));
  table.header = pilot_columns();
  for (const auto& r : records) {
    csv::Row row;
    for (const auto& name : table.header) {
      if (name == "p") row.push_back(r.p);
      else if (name == "mode") row.emplace_back(to_string(r.mode));
      else if (name == "kind") row.emplace_back(to_string(r.kind));
      else row.push_back(csv::number(field(r, name)));
    }
    table.rows.push_back(std::move(row));
  }
  return csv::format(table);
}

std::vector<PilotRunRecord> parse_pilot_csv(std::string_view text) {
  const csv::Table table = csv::parse(text);
  for (const auto& name : pilot_columns()) {
    if (table.column(name) < 0) throw SchemaError("pilot file lacks column '" + name + "'");
  }
  std::vector<PilotRunRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.header.size()) {
      throw SchemaError("pilot row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) + " fields");
    }
    PilotRunRecord r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& name = table.header[c];
      if (name == "p") r.p = row[c];
      else if (name == "mode") r.mode = parse_storage_mode(row[c]);
      else if (name == "kind") r.kind = parse_run_kind(row[c]);
      else if (auto* p = numeric(r, name)) *p = csv::to_number(row[c]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_pilot_csv(const std::string& path, const std::vector<PilotRunRecord>& records,
                     std::optional<std::uint64_t> seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << format_pilot_csv(records, seed);
}

std::vector<PilotRunRecord> read_pilot_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_pilot_csv(buffer.str());
}

}  // namespace semcloud
