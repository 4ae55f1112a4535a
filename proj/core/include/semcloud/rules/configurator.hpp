#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/datalog/engine.hpp"
#include "semcloud/learning/learned_function.hpp"
#include "semcloud/optimizer/slicing_externals.hpp"
#include "semcloud/pipeline_kg/graph.hpp"
#include "semcloud/rules/corpus.hpp"

namespace semcloud::rules {

struct Estimate {
  std::string pipeline;
  double ms = 0;
  double mp = 0;
  double ssl = 0;
  double spr = 0;
  double sst = 0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct CorpusRun {
  datalog::FactSet facts;  // EDB and everything derived
  datalog::EvaluationLog log;
  std::vector<Estimate> estimates;                            // estimated_resource, sorted
  std::vector<kg::ResourceConfiguration> configurations;      // configured_resource, sorted
  std::vector<Strategy> fired;  // strategy rules with at least one firing

  /// estimated_resource and configured_resource atoms, re-parseable by
  /// parse_facts.
  std::string derived_text() const;
};

/// Evaluates `program` over edb ∪ range_facts(range). Storage mode symbols
/// are read back through `cloud` (fs → fast, cs → cloud). Throws whatever
/// evaluate throws, and ConfigError for an unknown mode symbol.
CorpusRun run_corpus(const datalog::FactSet& edb, const kg::CloudAttributes& cloud,
                     const datalog::ExternalRegistry& registry, int range = kDefaultRange,
                     const datalog::Program& program = corpus());

struct Configured {
  kg::PipelineGraph graph;
  kg::ResourceConfiguration configuration;
  Strategy strategy = Strategy::FastUnsliced;
  Estimate estimate;
  CorpusRun run;
};

/// Runs the corpus on one pipeline and writes the single derived
/// configuration back onto it. The pilot record supplies the hasEst* facts
/// and any task values the graph leaves unset. Throws ConfigError when the
/// rules derive no configuration or more than one.
Configured configure(const kg::PipelineGraph& graph, const kg::CloudAttributes& cloud,
                     const std::optional<PilotRunRecord>& pilot, const datalog::ExternalRegistry& registry,
                     int range = kDefaultRange, const datalog::Program& program = corpus());

/// Learned estimators plus the slicing optimizers in one registry.
datalog::ExternalRegistry build_registry(const std::map<std::string, learn::LearnedFunction>& models,
                                         opt::SlicingExternalsConfig slicing);

/// The estimation record whose n is closest to `n` (ties: earliest).
/// Throws InvalidInput when there is none.
PilotRunRecord nearest_estimation_record(const std::vector<PilotRunRecord>& records, double n);

}  // namespace semcloud::rules
