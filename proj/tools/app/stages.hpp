#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "app/config.hpp"
#include "semcloud/datalog/externals.hpp"
#include "semcloud/learning/learned_function.hpp"
#include "semcloud/learning/search.hpp"
#include "semcloud/rules/configurator.hpp"
#include "semcloud/simulator/trace.hpp"

namespace semcloud::app {

/// What a command did: key/value pairs for the status line, the files it
/// wrote (relative to the output directory) and text for stdout.
struct StageResult {
  std::string command;
  std::string status = "ok";
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<std::string> files;
  std::string text;

  void add(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }
  /// One JSON object on one line.
  std::string status_line() const;
};

/// Writes `content` under config.out, creating directories.
void write_output(const ProjectConfig& config, const std::string& relative, const std::string& content,
                  StageResult& result);

StageResult run_gen(const ProjectConfig& config);
StageResult run_pilot(const ProjectConfig& config, bool dry_run = false);
StageResult run_learn(const ProjectConfig& config);
StageResult run_configure(const ProjectConfig& config, const std::string& pipeline_path);
StageResult run_simulate(const ProjectConfig& config, const std::string& pipeline_path, bool legacy_only = false);
StageResult run_report(const ProjectConfig& config);

// Pieces shared with the acceptance checks.

/// Chosen model per external (plus "time_fast"/"time_cloud") and one
/// report per (external, method) fit.
struct LearnOutcome {
  std::map<std::string, learn::LearnedFunction> models;
  std::vector<std::pair<std::string, learn::FitReport>> reports;
  std::map<std::string, learn::Method> chosen;
};
LearnOutcome learn_models(const std::vector<PilotRunRecord>& records, const ProjectConfig& config);

/// Registry over whatever models are present; externals without a model
/// stay unregistered.
datalog::ExternalRegistry registry_for(const std::map<std::string, learn::LearnedFunction>& models,
                                       const ProjectConfig& config);

/// Models found in <out>/models.
std::map<std::string, learn::LearnedFunction> load_models(const ProjectConfig& config);

/// The rule program: config.rules_file when set, else the shipped corpus.
datalog::Program rule_program(const ProjectConfig& config);

/// Distributed (configured reservations) and legacy traces over the
/// configured volumes, scaled from the pipeline's input.
struct VolumeSweep {
  std::vector<double> volumes;  // MB
  std::vector<sim::RunTrace> distributed;
  std::vector<sim::RunTrace> legacy;
  std::vector<sim::ComparisonRow> rows;
};
VolumeSweep volume_sweep(const kg::PipelineGraph& configured, const ProjectConfig& config);

}  // namespace semcloud::app
