#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcloud/etl/generator.hpp"
#include "semcloud/learning/learned_function.hpp"
#include "semcloud/pipeline_kg/graph.hpp"
#include "semcloud/simulator/cluster.hpp"

namespace semcloud::app {

struct PilotSettings {
  double max_records = 200000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int sizes = 10;
};

struct LearnSettings {
  std::vector<learn::Method> methods{learn::Method::PolyR, learn::Method::MLP, learn::Method::KNN};
  std::vector<std::string> time_features{"log_chunks", "log_slices", "n"};
  double target_nmae = 0.10;
  std::vector<double> fractions{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
  int resamples = 5;
};

struct SearchSettings {
  int steps = 16;
  double span = 64;
};

struct ProjectConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  etl::WorkloadSpec workload;
  sim::ClusterSpec cluster = sim::ClusterSpec::desk_default();
  sim::CostModel cost = pilot_cost();
  kg::CloudAttributes cloud = desk_cloud();
  PilotSettings pilot;
  LearnSettings learn;
  SearchSettings search;
  int range = 10;
  std::optional<std::string> rules_file;
  std::vector<double> volumes{0.25, 0.5, 0.75, 1.0};  // fractions of the pipeline volume

  /// Desk cost model with 5% run-to-run noise.
  static sim::CostModel pilot_cost();
  /// Node memory of the desk cluster; c2 * nst matches its fast tier.
  static kg::CloudAttributes desk_cloud();

  /// Throws ConfigError.
  void check() const;

  std::string path(const std::string& relative) const;
};

/// Reads a JSON project file; absent keys keep their defaults. Throws
/// ConfigError and IoError.
ProjectConfig load_config(const std::string& path);
ProjectConfig parse_config(const std::string& text);
std::string serialize_config(const ProjectConfig& config);

}  // namespace semcloud::app
