#include "app/config.hpp"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "semcloud/errors.hpp"

namespace semcloud::app {

using nlohmann::json;
using nlohmann::ordered_json;

sim::CostModel ProjectConfig::pilot_cost() {
  sim::CostModel c = sim::CostModel::desk_default();
  c.noise = 0.05;
  return c;
}

kg::CloudAttributes ProjectConfig::desk_cloud() {
  kg::CloudAttributes c;
  c.nm = 1536;
  c.nst = 15360;
  return c;
}

void ProjectConfig::check() const {
  workload.check();
  sim::check(cluster);
  sim::check(cost);
  kg::check(cloud);
  if (!(pilot.max_records >= 1)) throw ConfigError("pilot.max_records must be >= 1");
  if (pilot.seeds.empty() || pilot.sizes < 1) throw ConfigError("pilot needs seeds and sizes >= 1");
  if (learn.methods.empty()) throw ConfigError("learn.methods is empty");
  if (learn.resamples < 1) throw ConfigError("learn.resamples must be >= 1");
  for (double f : learn.fractions) {
    if (!(f > 0 && f <= 1)) throw ConfigError("learn.fractions must lie in (0, 1]");
  }
  if (search.steps < 1 || !(search.span >= 1)) throw ConfigError("search needs steps >= 1 and span >= 1");
  if (range < 1) throw ConfigError("range must be >= 1");
  if (volumes.empty()) throw ConfigError("volumes is empty");
  for (double v : volumes) {
    if (!(v > 0)) throw ConfigError("volumes must be positive");
  }
}

std::string ProjectConfig::path(const std::string& relative) const {
  return (std::filesystem::path(out) / relative).string();
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

json section(const json& j, const char* key) {
  if (!j.contains(key)) return json::object();
  if (!j[key].is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return j[key];
}

}  // namespace

ProjectConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{"seed", "out",    "workload", "cluster", "cost",  "cloud",
                                              "pilot", "learn", "search",   "range",   "rules", "volumes"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }

  ProjectConfig c;
  read(j, "seed", c.seed);
  read(j, "out", c.out);
  read(j, "range", c.range);
  read(j, "volumes", c.volumes);
  if (j.contains("rules")) {
    std::string file;
    read(j, "rules", file);
    if (!file.empty()) c.rules_file = file;
  }

  const json w = section(j, "workload");
  read(w, "production_lines", c.workload.production_lines);
  read(w, "machines", c.workload.machines);
  read(w, "duration", c.workload.duration);
  read(w, "rate", c.workload.rate);
  read(w, "record_bytes", c.workload.record_bytes);
  read(w, "attributes", c.workload.attributes);
  read(w, "absent_per_source", c.workload.absent_per_source);
  read(w, "programs", c.workload.programs);

  // cluster and cost keep the project defaults for keys they do not set
  if (j.contains("cluster")) {
    json merged = json::parse(sim::serialize_cluster(c.cluster));
    merged.merge_patch(section(j, "cluster"));
    c.cluster = sim::parse_cluster(merged.dump());
  }
  if (j.contains("cost")) {
    json merged = json::parse(sim::serialize_cost_model(c.cost));
    merged.merge_patch(section(j, "cost"));
    c.cost = sim::parse_cost_model(merged.dump());
  }

  const json cl = section(j, "cloud");
  read(cl, "id", c.cloud.id);
  read(cl, "c1", c.cloud.c1);
  read(cl, "c2", c.cloud.c2);
  read(cl, "c3", c.cloud.c3);
  read(cl, "nm", c.cloud.nm);
  read(cl, "nst", c.cloud.nst);
  read(cl, "fs", c.cloud.fs);
  read(cl, "cs", c.cloud.cs);

  const json p = section(j, "pilot");
  read(p, "max_records", c.pilot.max_records);
  read(p, "seeds", c.pilot.seeds);
  read(p, "sizes", c.pilot.sizes);

  const json l = section(j, "learn");
  if (l.contains("methods")) {
    std::vector<std::string> names;
    read(l, "methods", names);
    c.learn.methods.clear();
    for (const auto& m : names) c.learn.methods.push_back(learn::parse_method(m));
  }
  read(l, "time_features", c.learn.time_features);
  read(l, "target_nmae", c.learn.target_nmae);
  read(l, "fractions", c.learn.fractions);
  read(l, "resamples", c.learn.resamples);

  const json s = section(j, "search");
  read(s, "steps", c.search.steps);
  read(s, "span", c.search.span);

  c.check();
  return c;
}

ProjectConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ProjectConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["workload"] = {{"production_lines", c.workload.production_lines}, {"machines", c.workload.machines},
                   {"duration", c.workload.duration},                 {"rate", c.workload.rate},
                   {"record_bytes", c.workload.record_bytes},         {"attributes", c.workload.attributes},
                   {"absent_per_source", c.workload.absent_per_source}, {"programs", c.workload.programs}};
  j["cluster"] = ordered_json::parse(sim::serialize_cluster(c.cluster));
  j["cost"] = ordered_json::parse(sim::serialize_cost_model(c.cost));
  j["cloud"] = {{"id", c.cloud.id}, {"c1", c.cloud.c1},   {"c2", c.cloud.c2}, {"c3", c.cloud.c3},
                {"nm", c.cloud.nm}, {"nst", c.cloud.nst}, {"fs", c.cloud.fs}, {"cs", c.cloud.cs}};
  j["pilot"] = {{"max_records", c.pilot.max_records}, {"seeds", c.pilot.seeds}, {"sizes", c.pilot.sizes}};
  std::vector<std::string> methods;
  for (auto m : c.learn.methods) methods.emplace_back(learn::to_string(m));
  j["learn"] = {{"methods", methods},
                {"time_features", c.learn.time_features},
                {"target_nmae", c.learn.target_nmae},
                {"fractions", c.learn.fractions},
                {"resamples", c.learn.resamples}};
  j["search"] = {{"steps", c.search.steps}, {"span", c.search.span}};
  j["range"] = c.range;
  j["rules"] = c.rules_file.value_or("");
  j["volumes"] = c.volumes;
  return j.dump(2) + "\n";
}

}  // namespace semcloud::app
