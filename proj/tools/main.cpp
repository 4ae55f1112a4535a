#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "app/config.hpp"
#include "app/stages.hpp"
#include "semcloud/errors.hpp"
#include "semcloud/learning/learned_function.hpp"

using namespace semcloud;

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> machines;
  std::optional<double> duration;
  std::optional<double> rate;
  std::optional<double> record_bytes;
  std::optional<double> max_records;
  std::optional<double> noise;
  std::optional<std::string> methods;
  std::optional<int> range;
  std::optional<std::string> rules;
  std::optional<int> nodes;
  std::optional<double> node_memory;
};

app::ProjectConfig resolve(const std::string& config_path, const Overrides& o) {
  app::ProjectConfig c = config_path.empty() ? app::ProjectConfig{} : app::load_config(config_path);
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.machines) c.workload.machines = *o.machines;
  if (o.duration) c.workload.duration = *o.duration;
  if (o.rate) c.workload.rate = *o.rate;
  if (o.record_bytes) c.workload.record_bytes = *o.record_bytes;
  if (o.max_records) c.pilot.max_records = *o.max_records;
  if (o.noise) c.cost.noise = *o.noise;
  if (o.methods) {
    c.learn.methods.clear();
    std::stringstream list(*o.methods);
    for (std::string m; std::getline(list, m, ',');) {
      if (!m.empty()) c.learn.methods.push_back(learn::parse_method(m));
    }
  }
  if (o.range) c.range = *o.range;
  if (o.rules) c.rules_file = *o.rules;
  if (o.nodes || o.node_memory) {
    sim::NodeSpec node = c.cluster.nodes.front();
    if (o.node_memory) node.memory = *o.node_memory;
    const int count = o.nodes ? *o.nodes : static_cast<int>(c.cluster.nodes.size());
    if (count < 1) throw ConfigError("--nodes must be >= 1");
    sim::ClusterSpec cluster = sim::ClusterSpec::uniform(static_cast<std::size_t>(count), node);
    cluster.queue_latency = c.cluster.queue_latency;
    cluster.fast = c.cluster.fast;
    cluster.cloud = c.cluster.cloud;
    c.cluster = cluster;
  }
  c.check();
  return c;
}

void print_error(const std::string& command, const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["status"] = "error";
  j["code"] = code;
  j["message"] = message;
  std::cerr << "error: " << message << "\n" << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"semcloud: semantic ETL pipeline configuration on a simulated cluster"};
  cli.require_subcommand(1);

  std::string config_path;
  Overrides o;
  cli.add_option("-c,--config", config_path, "Project config (JSON)");
  cli.add_option("-o,--out", o.out, "Output directory");
  cli.add_option("--seed", o.seed, "Root seed");

  auto* gen = cli.add_subcommand("gen", "Generate the multi-source workload");
  gen->add_option("--machines", o.machines, "Machines");
  gen->add_option("--duration", o.duration, "Seconds of data per machine");
  gen->add_option("--rate", o.rate, "Records per second per machine");
  gen->add_option("--record-bytes", o.record_bytes, "Bytes per record");

  bool dry_run = false;
  auto* pilot = cli.add_subcommand("pilot", "Collect pilot running statistics on the simulator");
  pilot->add_flag("--dry-run", dry_run, "Print the plan without running it");
  pilot->add_option("--max-records", o.max_records, "Largest pilot size");
  pilot->add_option("--noise", o.noise, "Relative run-to-run noise");

  auto* learn_cmd = cli.add_subcommand("learn", "Fit rule parameters from pilot statistics");
  learn_cmd->add_option("--methods", o.methods, "Comma-separated subset of polyr,mlp,knn");

  std::string pipeline;
  auto* configure = cli.add_subcommand("configure", "Configure a pipeline with the rule corpus");
  configure->add_option("pipeline", pipeline, "Pipeline document")->required();
  configure->add_option("--range", o.range, "Size of the range/1 relation");
  configure->add_option("--rules", o.rules, "Rule program replacing the shipped corpus");

  bool legacy_only = false;
  auto* simulate = cli.add_subcommand("simulate", "Run a configured pipeline against the legacy baseline");
  simulate->add_option("pipeline", pipeline, "Configured pipeline document")->required();
  simulate->add_flag("--legacy-only", legacy_only, "Only run the single-node baseline");
  simulate->add_option("--nodes", o.nodes, "Uniform cluster size");
  simulate->add_option("--node-memory", o.node_memory, "Node memory in MB");

  auto* report = cli.add_subcommand("report", "Consolidate learning and optimisation curves");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string command = cli.get_subcommands().front()->get_name();
  try {
    const app::ProjectConfig config = resolve(config_path, o);
    app::StageResult result;
    if (gen->parsed()) result = app::run_gen(config);
    else if (pilot->parsed()) result = app::run_pilot(config, dry_run);
    else if (learn_cmd->parsed()) result = app::run_learn(config);
    else if (configure->parsed()) result = app::run_configure(config, pipeline);
    else if (simulate->parsed()) result = app::run_simulate(config, pipeline, legacy_only);
    else if (report->parsed()) result = app::run_report(config);
    std::cout << result.text;
    std::cerr << result.status_line() << "\n";
    return 0;
  } catch (const MissingExternal& e) {
    print_error(command, std::string(to_string(e.code())),
                std::string(e.what()) + " (hint: run `semcloud learn` so that the model files exist under the output directory)");
    return 1;
  } catch (const Error& e) {
    print_error(command, std::string(to_string(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(command, "internal", e.what());
    return 1;
  }
}
