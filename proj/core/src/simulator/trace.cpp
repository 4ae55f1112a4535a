#include "semcloud/simulator/trace.hpp"

#include <algorithm>
#include <numeric>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::sim {

double trapezoid(const Series& s) {
  double area = 0;
  for (std::size_t k = 1; k < s.size(); ++k) area += 0.5 * (s[k].value + s[k - 1].value) * (s[k].t - s[k - 1].t);
  return area;
}

double peak(const Series& s) {
  double p = 0;
  for (const auto& point : s) p = std::max(p, point.value);
  return p;
}

std::size_t RunTrace::restarts() const {
  std::size_t total = 0;
  for (const auto& s : steps) total += s.restarts;
  return total;
}

double RunTrace::max_node_peak() const {
  return peak_memory.empty() ? 0.0 : *std::max_element(peak_memory.begin(), peak_memory.end());
}

std::string format_trace_csv(const RunTrace& trace) {
  csv::Table table;
  table.header = {"node", "metric", "t", "value"};
  auto emit = [&](const std::vector<Series>& all, const char* metric) {
    for (std::size_t k = 0; k < all.size(); ++k) {
      for (const auto& p : all[k]) table.rows.push_back({trace.nodes.at(k), metric, csv::number(p.t), csv::number(p.value)});
    }
  };
  emit(trace.memory, "memory_mb");
  emit(trace.cpu, "cpu_millicores");
  return csv::format(table);
}

std::string format_trace_summary_csv(const RunTrace& trace) {
  csv::Table table;
  table.header = {"step", "start", "end", "busy", "messages", "restarts", "peak_instance_memory", "storage",
                    "reservation"};
  for (Step s : {Step::Retrieve, Step::Slice, Step::Prepare, Step::Store}) {
    const auto& t = trace.step(s);
    table.rows.push_back({std::string(to_string(s)), csv::number(t.start), csv::number(t.end), csv::number(t.busy),
                     std::to_string(t.messages), std::to_string(t.restarts), csv::number(t.peak_instance_memory),
                     csv::number(t.storage), csv::number(t.reservation)});
  }
  table.rows.push_back({"total", "0", csv::number(trace.consumed_time), csv::number(trace.cpu_integral), "", "",
                   csv::number(trace.max_node_peak()), "", ""});
  return csv::format(table);
}

namespace {
double ratio(double a, double b) { return a == b ? 1.0 : a / b; }
}  // namespace

double ComparisonRow::memory_ratio() const { return ratio(memory_a, memory_b); }
double ComparisonRow::cpu_ratio() const { return ratio(cpu_a, cpu_b); }
double ComparisonRow::time_ratio() const { return ratio(time_a, time_b); }

std::vector<ComparisonRow> compare(const std::vector<RunTrace>& a, const std::vector<RunTrace>& b,
                                   const std::vector<double>& volumes) {
  if (a.size() != volumes.size() || b.size() != volumes.size()) {
    throw InvalidInput("compare needs one trace per volume on both sides");
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t k = 0; k < volumes.size(); ++k) {
    rows.push_back(ComparisonRow{volumes[k], a[k].max_node_peak(), b[k].max_node_peak(), a[k].cpu_integral,
                                 b[k].cpu_integral, a[k].consumed_time, b[k].consumed_time});
  }
  return rows;
}

std::string format_comparison_csv(const std::vector<ComparisonRow>& rows) {
  csv::Table table;
  table.header = {"volume_mb", "memory_a", "memory_b", "memory_ratio", "cpu_a", "cpu_b", "cpu_ratio", "time_a",
                    "time_b", "time_ratio"};
  for (const auto& r : rows) {
    table.rows.push_back({csv::number(r.volume), csv::number(r.memory_a), csv::number(r.memory_b),
                     csv::number(r.memory_ratio()), csv::number(r.cpu_a), csv::number(r.cpu_b),
                     csv::number(r.cpu_ratio()), csv::number(r.time_a), csv::number(r.time_b),
                     csv::number(r.time_ratio())});
  }
  return csv::format(table);
}

}  // namespace semcloud::sim
