#include "app/stages.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "semcloud/common/csv.hpp"
#include "semcloud/common/seed.hpp"
#include "semcloud/datalog/fact_set.hpp"
#include "semcloud/errors.hpp"
#include "semcloud/etl/reference.hpp"
#include "semcloud/etl/schema.hpp"
#include "semcloud/learning/dataset.hpp"
#include "semcloud/learning/model_io.hpp"
#include "semcloud/learning/registry.hpp"
#include "semcloud/optimizer/optimizer.hpp"
#include "semcloud/optimizer/slicing_externals.hpp"
#include "semcloud/pipeline_kg/document.hpp"
#include "semcloud/simulator/deploy.hpp"
#include "semcloud/simulator/pilot.hpp"
#include "semcloud/simulator/run.hpp"

namespace semcloud::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* const kPilotFile = "pilot/pilot.csv";

std::string seed_comment(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<PilotRunRecord> read_pilot(const ProjectConfig& config) {
  const std::string path = config.path(kPilotFile);
  if (!fs::exists(path)) throw IoError("no pilot statistics at " + path + "; run `semcloud pilot` first");
  return read_pilot_csv(path);
}

double input_records(const kg::PipelineGraph& g) {
  for (const auto& id : g.input_data) {
    if (const auto* d = g.data_entity(id); d && d->no_records) return *d->no_records;
  }
  throw InvalidInput("pipeline " + g.id + " has no input data with a record count");
}

std::vector<std::string> time_model_names() { return {"time_fast", "time_cloud"}; }

std::string model_file(const std::string& name) { return "models/" + name + ".json"; }

}  // namespace

std::string StageResult::status_line() const {
  ordered_json j;
  j["command"] = command;
  j["status"] = status;
  for (const auto& [k, v] : fields) j[k] = v;
  j["files"] = files;
  return j.dump();
}

void write_output(const ProjectConfig& config, const std::string& relative, const std::string& content,
                  StageResult& result) {
  const fs::path path = fs::path(config.out) / relative;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
  result.files.push_back(relative);
}

// ---------------------------------------------------------------------------

StageResult run_gen(const ProjectConfig& config) {
  StageResult r;
  r.command = "gen";
  etl::WorkloadSpec spec = config.workload;
  spec.seed = sub_seed(config.seed, "gen");
  const etl::Workload w = etl::generate_workload(spec);

  for (const auto& s : w.sources) {
    const std::string base = "workload/" + s.descriptor.name;
    write_output(config, base + "." + std::string(etl::to_string(s.descriptor.format)), s.content, r);
    write_output(config, base + ".mapping.json", etl::serialize_descriptor(s.descriptor), r);
  }
  write_output(config, "workload/reference.csv", etl::format_reference_csv(w.reference), r);
  write_output(config, "workload/truth.csv", etl::format_unified_csv(w.records, w.schema), r);

  const double volume = static_cast<double>(w.records.size()) * spec.record_bytes / 1e6;
  ordered_json manifest;
  manifest["seed"] = spec.seed;
  manifest["machines"] = spec.machines;
  manifest["production_lines"] = spec.production_lines;
  manifest["records"] = w.records.size();
  manifest["sources"] = w.sources.size();
  manifest["record_bytes"] = spec.record_bytes;
  manifest["volume_mb"] = volume;
  write_output(config, "workload/manifest.json", manifest.dump(2) + "\n", r);

  r.add("seed", std::to_string(spec.seed));
  r.add("records", std::to_string(w.records.size()));
  r.add("sources", std::to_string(w.sources.size()));
  r.text = "generated " + std::to_string(w.records.size()) + " records from " + std::to_string(spec.machines) +
           " machines in " + std::to_string(w.sources.size()) + " sources (" + csv::number(volume) + " MB)\n";
  return r;
}

// ---------------------------------------------------------------------------

namespace {

sim::PilotPlan pilot_plan(const ProjectConfig& config) {
  sim::PilotPlan plan = sim::PilotPlan::desk_default(config.pilot.max_records);
  plan.seeds = config.pilot.seeds;
  plan.sizes.clear();
  for (int k = 1; k <= config.pilot.sizes; ++k) {
    plan.sizes.push_back(std::round(config.pilot.max_records * k / config.pilot.sizes));
  }
  plan.record_bytes = config.workload.record_bytes;
  plan.machines = static_cast<std::size_t>(config.workload.machines);
  return plan;
}

}  // namespace

StageResult run_pilot(const ProjectConfig& config, bool dry_run) {
  StageResult r;
  r.command = "pilot";
  const sim::PilotPlan plan = pilot_plan(config);
  sim::CostModel cost = config.cost;
  cost.seed = sub_seed(config.seed, "pilot");
  r.add("seed", std::to_string(cost.seed));

  if (dry_run) {
    std::ostringstream text;
    text << "pilot plan: " << plan.configs.size() << " configs x " << plan.seeds.size() << " seeds x "
         << plan.sizes.size() << " sizes = " << plan.size() << " runs\n";
    for (const auto& c : plan.configs) {
      text << "  " << to_string(c.kind) << " nc=" << csv::number(c.nc_fraction) << "n ns=" << csv::number(c.ns_fraction)
           << "nc mode=" << to_string(c.mode) << "\n";
    }
    text << "  sizes:";
    for (double s : plan.sizes) text << " " << csv::number(s);
    text << "\n";
    r.text = text.str();
    r.add("rows", "0");
    r.add("planned", std::to_string(plan.size()));
    return r;
  }

  const sim::PilotStats stats = sim::collect_pilot_stats(plan, config.cluster, cost, "p");
  write_output(config, kPilotFile, format_pilot_csv(stats.records, cost.seed), r);
  csv::Table failures;
  failures.comments = {"seed=" + std::to_string(cost.seed)};
  failures.header = {"row", "message"};
  for (const auto& f : stats.failures) failures.rows.push_back({std::to_string(f.index), f.message});
  write_output(config, "pilot/failures.csv", csv::format(failures), r);

  r.add("rows", std::to_string(stats.records.size()));
  r.add("failures", std::to_string(stats.failures.size()));
  r.text = "collected " + std::to_string(stats.records.size()) + " pilot rows (" +
           std::to_string(stats.failures.size()) + " failed runs)\n";
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void select_model(const std::string& name, const learn::Dataset& data, const ProjectConfig& config,
                  LearnOutcome& out) {
  std::optional<learn::Method> best;
  learn::FitReport best_report;
  learn::HyperParams best_params;
  for (learn::Method m : config.learn.methods) {
    const auto seed = sub_seed(config.seed, "learn/" + name + "/" + std::string(learn::to_string(m)));
    const learn::GridResult g = learn::grid_search(m, learn::default_grid(m), data, seed);
    out.reports.emplace_back(name, g.report);
    const bool better = !best || g.report.nmae < best_report.nmae - learn::kNmaeTieTolerance ||
                        (std::abs(g.report.nmae - best_report.nmae) <= learn::kNmaeTieTolerance &&
                         g.report.model_size < best_report.model_size);
    if (std::isfinite(g.report.nmae) && better) {
      best = m;
      best_report = g.report;
      best_params = g.best;
    }
  }
  if (!best) throw InsufficientData(name + ": no method could be fitted on " + std::to_string(data.rows()) + " rows");
  out.models.insert_or_assign(name, learn::fit(*best, data, best_params));
  out.chosen[name] = *best;
}

}  // namespace

LearnOutcome learn_models(const std::vector<PilotRunRecord>& records, const ProjectConfig& config) {
  LearnOutcome out;
  const auto& columns = pilot_columns();
  for (const auto& sig : learn::model_signatures()) {
    std::vector<std::string> features;
    for (const auto& p : sig.params) {
      if (std::find(columns.begin(), columns.end(), p) != columns.end()) features.push_back(p);
    }
    select_model(sig.name, learn::make_dataset(records, features, sig.target, sig.kind), config, out);
  }
  for (StorageMode mode : {StorageMode::Fast, StorageMode::Cloud}) {
    const learn::Dataset data = opt::make_time_dataset(records, config.learn.time_features, "total_time", mode);
    if (data.rows() == 0) continue;
    select_model(mode == StorageMode::Fast ? "time_fast" : "time_cloud", data, config, out);
  }
  return out;
}

StageResult run_learn(const ProjectConfig& config) {
  StageResult r;
  r.command = "learn";
  const auto records = read_pilot(config);
  const LearnOutcome outcome = learn_models(records, config);

  for (const auto& [name, model] : outcome.models) write_output(config, model_file(name), learn::serialize_model(model), r);

  csv::Table fit;
  fit.comments = {"seed=" + std::to_string(config.seed)};
  fit.header = {"external", "method", "params", "nmae", "model_size", "train_rows", "test_rows", "rank_deficient",
                "selected"};
  csv::Table timings;
  timings.comments = {"wall-clock timings; not reproducible"};
  timings.header = {"external", "method", "learning_time_ms", "inference_time_ms"};
  std::ostringstream text;
  for (const auto& [name, rep] : outcome.reports) {
    const bool selected = outcome.chosen.at(name) == rep.method;
    fit.rows.push_back({name, std::string(learn::to_string(rep.method)), rep.params, csv::number(rep.nmae),
                        std::to_string(rep.model_size), std::to_string(rep.train_rows), std::to_string(rep.test_rows),
                        rep.rank_deficient ? "1" : "0", selected ? "1" : "0"});
    timings.rows.push_back({name, std::string(learn::to_string(rep.method)), csv::number(rep.learning_time_ms),
                            csv::number(rep.inference_time_ms)});
    text << (selected ? "* " : "  ") << name << " " << learn::to_string(rep.method) << " nmae=" << csv::number(rep.nmae)
         << " (" << rep.params << ")\n";
  }
  // macro average per method over the rule externals (time models excluded)
  std::map<learn::Method, std::pair<double, std::size_t>> macro;
  for (const auto& [name, rep] : outcome.reports) {
    if (!learn::find_signature(name)) continue;
    auto& [sum, count] = macro[rep.method];
    sum += rep.nmae;
    ++count;
  }
  csv::Table averaged;
  averaged.comments = fit.comments;
  averaged.header = {"method", "externals", "macro_nmae"};
  for (const auto& [method, acc] : macro) {
    averaged.rows.push_back({std::string(learn::to_string(method)), std::to_string(acc.second),
                             csv::number(acc.first / static_cast<double>(acc.second))});
  }
  write_output(config, "reports/fit.csv", csv::format(fit), r);
  write_output(config, "reports/fit_macro.csv", csv::format(averaged), r);
  write_output(config, "reports/timings.csv", csv::format(timings), r);

  r.add("seed", std::to_string(config.seed));
  r.add("models", std::to_string(outcome.models.size()));
  r.text = text.str();
  return r;
}

// ---------------------------------------------------------------------------

std::map<std::string, learn::LearnedFunction> load_models(const ProjectConfig& config) {
  std::map<std::string, learn::LearnedFunction> models;
  std::vector<std::string> names = time_model_names();
  for (const auto& sig : learn::model_signatures()) names.push_back(sig.name);
  for (const auto& name : names) {
    const std::string path = config.path(model_file(name));
    if (fs::exists(path)) models.insert_or_assign(name, learn::load_model(path));
  }
  return models;
}

datalog::ExternalRegistry registry_for(const std::map<std::string, learn::LearnedFunction>& models,
                                       const ProjectConfig& config) {
  std::map<std::string, learn::LearnedFunction> estimators;
  for (const auto& [name, model] : models) {
    if (learn::find_signature(name)) estimators.insert_or_assign(name, model);
  }
  datalog::ExternalRegistry base;
  if (auto it = models.find("time_fast"); it != models.end()) {
    opt::SlicingExternalsConfig slicing;
    slicing.fast = opt::TimeModel::from_learned(it->second);
    if (auto c = models.find("time_cloud"); c != models.end()) slicing.cloud = opt::TimeModel::from_learned(c->second);
    const int steps = config.search.steps;
    const double span = config.search.span;
    slicing.space = [steps, span](double n) { return opt::SearchSpace::desk_default(n, steps, span); };
    base = opt::register_slicing_externals(std::move(slicing));
  }
  return learn::register_externals(estimators, std::move(base));
}

datalog::Program rule_program(const ProjectConfig& config) {
  if (!config.rules_file) return rules::corpus();
  return datalog::parse_program(read_text(*config.rules_file));
}

StageResult run_configure(const ProjectConfig& config, const std::string& pipeline_path) {
  StageResult r;
  r.command = "configure";
  const kg::PipelineGraph graph = kg::load_pipeline(pipeline_path);
  const auto registry = registry_for(load_models(config), config);
  PilotRunRecord prior = rules::nearest_estimation_record(read_pilot(config), input_records(graph));
  prior.p = graph.id;

  const datalog::Program program = rule_program(config);
  const rules::Configured out = rules::configure(graph, config.cloud, prior, registry, config.range, program);
  const auto& c = out.configuration;

  write_output(config, "configured/" + graph.id + ".json", kg::serialize_pipeline(out.graph), r);
  write_output(config, "configured/" + graph.id + ".facts",
               "% seed=" + std::to_string(config.seed) + " strategy=" + std::string(rules::to_string(out.strategy)) +
                   "\n" + out.run.derived_text(),
               r);
  write_output(config, "configured/rules.dl", datalog::print_program(program), r);

  r.add("seed", std::to_string(config.seed));
  r.add("pipeline", graph.id);
  r.add("strategy", std::string(rules::to_string(out.strategy)));
  r.add("nc", csv::number(c.nc));
  r.add("ns", csv::number(c.ns));
  r.add("mode", std::string(to_string(c.mode)));
  r.add("mrs", csv::number(c.mrs));
  r.add("mrp", csv::number(c.mrp));
  const auto tuples = datalog::query(out.run.facts, "configured_resource", 6);
  r.text = datalog::format_atom("configured_resource", tuples.front()) + "\nstrategy " +
           std::string(rules::to_string(out.strategy)) + "\n";
  return r;
}

// ---------------------------------------------------------------------------

VolumeSweep volume_sweep(const kg::PipelineGraph& configured, const ProjectConfig& config) {
  const sim::DeploySettings base = sim::settings_from(configured);
  VolumeSweep out;
  for (std::size_t i = 0; i < config.volumes.size(); ++i) {
    sim::DeploySettings s = base;
    s.n = std::round(config.volumes[i] * base.n);
    sim::CostModel cost = config.cost;
    cost.seed = sub_seed(config.seed, "simulate/volume/" + std::to_string(i));
    const sim::SimWorkload w{s.n, s.record_bytes, static_cast<std::size_t>(config.workload.machines)};

    sim::DeployOptions options;
    options.policy = sim::ReservationPolicy::Configured;
    const sim::ExecutionPlan plan = sim::deploy(s, config.cluster, cost, options);
    out.distributed.push_back(sim::run(plan, w).trace);
    out.legacy.push_back(sim::run_legacy(w, config.cluster.nodes.front(), config.cluster, cost, s.mode));
    out.volumes.push_back(w.volume());
  }
  out.rows = sim::compare(out.distributed, out.legacy, out.volumes);
  return out;
}

StageResult run_simulate(const ProjectConfig& config, const std::string& pipeline_path, bool legacy_only) {
  StageResult r;
  r.command = "simulate";
  const kg::PipelineGraph graph = kg::load_pipeline(pipeline_path);
  const sim::DeploySettings settings = sim::settings_from(graph);
  sim::CostModel cost = config.cost;
  cost.seed = sub_seed(config.seed, "simulate");
  const sim::SimWorkload w{settings.n, settings.record_bytes, static_cast<std::size_t>(config.workload.machines)};
  const std::string seed = seed_comment(cost.seed);
  r.add("seed", std::to_string(cost.seed));
  std::ostringstream text;

  std::optional<sim::RunTrace> distributed;
  if (!legacy_only) {
    sim::DeployOptions options;
    options.policy = sim::ReservationPolicy::Configured;
    const sim::ExecutionPlan plan = sim::deploy(settings, config.cluster, cost, options);
    write_output(config, "sim/plan.txt", plan.describe(), r);
    distributed = sim::run(plan, w).trace;
    write_output(config, "sim/distributed_trace.csv", seed + sim::format_trace_csv(*distributed), r);
    write_output(config, "sim/distributed_summary.csv", seed + sim::format_trace_summary_csv(*distributed), r);
    text << "distributed: " << csv::number(distributed->consumed_time) << " s, peak node memory "
         << csv::number(distributed->max_node_peak()) << " MB\n";
    r.add("distributed_time", csv::number(distributed->consumed_time));
  }

  const sim::RunTrace legacy = sim::run_legacy(w, config.cluster.nodes.front(), config.cluster, cost, settings.mode);
  write_output(config, "sim/legacy_trace.csv", seed + sim::format_trace_csv(legacy), r);
  write_output(config, "sim/legacy_summary.csv", seed + sim::format_trace_summary_csv(legacy), r);
  text << "legacy: " << csv::number(legacy.consumed_time) << " s, peak memory " << csv::number(legacy.max_node_peak())
       << " MB\n";
  r.add("legacy_time", csv::number(legacy.consumed_time));

  if (!legacy_only) {
    const VolumeSweep sweep = volume_sweep(graph, config);
    write_output(config, "sim/comparison.csv",
                 seed_comment(config.seed) + sim::format_comparison_csv(sweep.rows), r);
    const auto& last = sweep.rows.back();
    text << "time ratio distributed/legacy at " << csv::number(last.volume) << " MB: " << csv::number(last.time_ratio())
         << "\n";
    r.add("time_ratio", csv::number(last.time_ratio()));
  }
  r.text = text.str();
  return r;
}

// ---------------------------------------------------------------------------

StageResult run_report(const ProjectConfig& config) {
  StageResult r;
  r.command = "report";
  const bool has_pilot = fs::exists(config.path(kPilotFile));
  const auto models = load_models(config);
  const bool has_comparison = fs::exists(config.path("sim/comparison.csv"));
  if (!has_pilot && models.empty() && !has_comparison) {
    r.status = "empty";
    r.text = "nothing to report in " + config.out + "\n";
    return r;
  }

  std::ostringstream summary;
  summary << "semcloud report (seed " << config.seed << ")\n";

  if (has_pilot && models.count("time_fast")) {
    const auto records = read_pilot(config);
    const double n = config.pilot.max_records;
    const PilotRunRecord prior = rules::nearest_estimation_record(records, n);
    const opt::SlicingQuery q{n * config.workload.record_bytes / 1e6, n, prior.ts, prior.tp};
    const opt::SearchSpace space = opt::SearchSpace::desk_default(n, config.search.steps, config.search.span);
    const opt::TimeModel model = opt::TimeModel::from_learned(models.at("time_fast"));
    const opt::OptResult best = opt::optimize_slicing(model, q, space);

    std::vector<double> ns_values;
    for (std::size_t i = 0; i < space.nc_count(); ++i) {
      const auto first = space.at(i, 0);
      if (!first || first->first != best.nc) continue;
      for (std::size_t j = 0; j < space.ns_count(); ++j) {
        if (const auto p = space.at(i, j)) ns_values.push_back(p->second);
      }
      break;
    }
    const auto curve = opt::sweet_spot_curve(model, q, best.nc, ns_values);
    write_output(config, "reports/sweet_spot.csv", opt::format_curve_csv(curve, best.nc), r);

    sim::CostModel exact = config.cost;
    exact.noise = 0;
    const opt::TimeModel simulated = sim::simulated_time_model(config.cluster, exact, config.workload.record_bytes,
                                                               static_cast<std::size_t>(config.workload.machines));
    const auto sim_curve = opt::sweet_spot_curve(simulated, q, best.nc, ns_values);
    write_output(config, "reports/sweet_spot_simulated.csv", opt::format_curve_csv(sim_curve, best.nc), r);

    summary << "sweet spot at n=" << csv::number(n) << ": nc=" << csv::number(best.nc) << " ns=" << csv::number(best.ns)
            << " predicted " << csv::number(best.predicted_time) << " s, simulated "
            << csv::number(simulated(q, best.nc, best.ns)) << " s\n";
    r.add("nc", csv::number(best.nc));
    r.add("ns", csv::number(best.ns));
  }

  if (has_pilot) {
    const auto records = read_pilot(config);
    const learn::Dataset data = learn::make_dataset(records, {"n", "v"}, "ms", RunKind::Estimation);
    csv::Table table;
    table.comments = {"seed=" + std::to_string(config.seed) + " target=ms target_nmae=" +
                      csv::number(config.learn.target_nmae)};
    table.header = {"method", "fraction", "mean_nmae"};
    for (learn::Method m : config.learn.methods) {
      const std::string tag = std::string(learn::to_string(m));
      const auto g = learn::grid_search(m, learn::default_grid(m), data, sub_seed(config.seed, "report/grid/" + tag));
      const auto sweep = learn::min_train_fraction_sweep(m, g.best, data, config.learn.target_nmae,
                                                         config.learn.fractions,
                                                         sub_seed(config.seed, "report/sweep/" + tag),
                                                         config.learn.resamples);
      for (const auto& p : sweep.points) {
        table.rows.push_back({tag, csv::number(p.fraction), csv::number(p.mean_nmae)});
      }
      summary << "minimum training fraction for ms, " << tag << ": "
              << (sweep.min_fraction ? csv::number(*sweep.min_fraction) : std::string("not reached")) << "\n";
    }
    write_output(config, "reports/min_train.csv", csv::format(table), r);
  }

  if (has_comparison) {
    const auto table = csv::parse(read_text(config.path("sim/comparison.csv")));
    summary << "legacy comparison (" << table.rows.size() << " volumes) in sim/comparison.csv\n";
  }

  write_output(config, "reports/summary.txt", summary.str(), r);
  r.add("seed", std::to_string(config.seed));
  r.text = summary.str();
  return r;
}

}  // namespace semcloud::app
