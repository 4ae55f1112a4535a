#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "semcloud/simulator/deploy.hpp"

namespace semcloud::sim {

struct SeriesPoint {
  double t = 0;
  double value = 0;
};

/// Piecewise-linear series. Steps are recorded as two points with the same
/// timestamp.
using Series = std::vector<SeriesPoint>;

double trapezoid(const Series& series);
double peak(const Series& series);

struct StepTotals {
  double start = 0;
  double end = 0;
  double busy = 0;            // instance-seconds
  std::size_t messages = 0;
  std::size_t restarts = 0;
  double peak_instance_memory = 0;  // MB
  double storage = 0;               // MB written
  double reservation = 0;           // MB per instance

  double duration() const { return end - start; }
};

struct ChannelCounters {
  std::size_t published = 0;
  std::size_t delivered = 0;
  std::size_t acknowledged = 0;
};

struct RunTrace {
  std::string label;
  std::vector<std::string> nodes;
  std::vector<Series> memory;  // per node, MB
  std::vector<Series> cpu;     // per node, millicores
  std::array<StepTotals, kStepCount> steps{};
  std::array<ChannelCounters, 3> channels{};
  double consumed_time = 0;
  double cpu_integral = 0;  // millicore-seconds
  std::vector<double> peak_memory;  // per node

  const StepTotals& step(Step s) const { return steps[static_cast<std::size_t>(s)]; }
  std::size_t restarts() const;
  double max_node_peak() const;
};

/// Long-format series: node,metric,t,value.
std::string format_trace_csv(const RunTrace& trace);
/// One row per step plus a totals row.
std::string format_trace_summary_csv(const RunTrace& trace);

struct ComparisonRow {
  double volume = 0;
  double memory_a = 0;
  double memory_b = 0;
  double cpu_a = 0;
  double cpu_b = 0;
  double time_a = 0;
  double time_b = 0;

  double memory_ratio() const;
  double cpu_ratio() const;
  double time_ratio() const;
};

/// Pairs traces over the same volume series. Memory is the largest per-node
/// peak. Ratios are a / b. Throws InvalidInput on length mismatch.
std::vector<ComparisonRow> compare(const std::vector<RunTrace>& a, const std::vector<RunTrace>& b,
                                   const std::vector<double>& volumes);
std::string format_comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace semcloud::sim
