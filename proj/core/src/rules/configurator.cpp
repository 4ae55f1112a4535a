#include "semcloud/rules/configurator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semcloud/errors.hpp"
#include "semcloud/learning/registry.hpp"
#include "semcloud/pipeline_kg/facts.hpp"

namespace semcloud::rules {

using datalog::Value;

namespace {

double number(const Value& v, const char* what) {
  if (!v.is_number()) throw TypeMismatch(std::string(what) + " is not a number");
  return v.as_number();
}

StorageMode mode_of(const Value& v, const kg::CloudAttributes& cloud) {
  if (v.is_symbol()) {
    if (v.as_symbol() == cloud.fs) return StorageMode::Fast;
    if (v.as_symbol() == cloud.cs) return StorageMode::Cloud;
  }
  throw ConfigError("configured storage '" + datalog::format_atom("mode", {v}) + "' is neither " + cloud.fs +
                    " nor " + cloud.cs);
}

}  // namespace

std::string CorpusRun::derived_text() const {
  datalog::FactSet out;
  for (const char* pred : {"estimated_resource", "configured_resource"}) {
    if (const auto* rel = facts.find(pred, 6)) {
      for (const auto& t : *rel) out.insert(pred, t);
    }
  }
  return out.to_text();
}

CorpusRun run_corpus(const datalog::FactSet& edb, const kg::CloudAttributes& cloud,
                     const datalog::ExternalRegistry& registry, int range, const datalog::Program& program) {
  datalog::FactSet input = edb;
  input.merge(range_facts(range));

  CorpusRun run;
  run.facts = datalog::evaluate(program, input, registry, &run.log);

  for (const auto& t : datalog::query(run.facts, "estimated_resource", 6)) {
    if (!t[0].is_symbol()) continue;
    run.estimates.push_back(Estimate{t[0].as_symbol(), number(t[1], "ms"), number(t[2], "mp"), number(t[3], "ssl"),
                                     number(t[4], "spr"), number(t[5], "sst")});
  }
  for (const auto& t : datalog::query(run.facts, "configured_resource", 6)) {
    if (!t[0].is_symbol()) continue;
    run.configurations.push_back(kg::ResourceConfiguration{t[0].as_symbol(), number(t[1], "nc"), number(t[2], "ns"),
                                                           mode_of(t[3], cloud), number(t[4], "mrs"),
                                                           number(t[5], "mrp")});
  }
  const auto& rules = program.rules();
  for (std::size_t i = 0; i < rules.size() && i < run.log.firings.size(); ++i) {
    if (run.log.firings[i] == 0) continue;
    if (auto s = strategy_of_label(rules[i].label)) run.fired.push_back(*s);
  }
  return run;
}

Configured configure(const kg::PipelineGraph& graph, const kg::CloudAttributes& cloud,
                     const std::optional<PilotRunRecord>& pilot, const datalog::ExternalRegistry& registry,
                     int range, const datalog::Program& program) {
  CorpusRun run = run_corpus(kg::to_facts(graph, cloud, pilot), cloud, registry, range, program);

  std::ostringstream why;
  if (run.configurations.size() != 1 || run.fired.size() != 1) {
    why << "pipeline " << graph.id << ": rules derived " << run.configurations.size()
        << " configurations from " << run.fired.size() << " strategy rules";
    if (run.estimates.empty()) why << "; no estimate (missing hasEst* facts or estimator failure)";
    for (const auto& d : run.log.diagnostics) {
      why << "\n  " << (d.rule_label.empty() ? "rule " + std::to_string(d.rule_index) : d.rule_label) << ": "
          << d.message;
    }
    throw ConfigError(why.str());
  }

  Configured out;
  out.configuration = run.configurations.front();
  out.strategy = run.fired.front();
  for (const auto& e : run.estimates) {
    if (e.pipeline == graph.id) out.estimate = e;
  }
  out.graph = kg::apply_configuration(graph, out.configuration);
  out.run = std::move(run);
  return out;
}

datalog::ExternalRegistry build_registry(const std::map<std::string, learn::LearnedFunction>& models,
                                         opt::SlicingExternalsConfig slicing) {
  return learn::register_externals(models, opt::register_slicing_externals(std::move(slicing)));
}

PilotRunRecord nearest_estimation_record(const std::vector<PilotRunRecord>& records, double n) {
  const PilotRunRecord* best = nullptr;
  for (const auto& r : records) {
    if (r.kind != RunKind::Estimation) continue;
    if (!best || std::abs(r.n - n) < std::abs(best->n - n)) best = &r;
  }
  if (!best) throw InvalidInput("no estimation pilot records");
  return *best;
}

}  // namespace semcloud::rules
