#include "semcloud/simulator/cluster.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "semcloud/errors.hpp"

namespace semcloud::sim {

using nlohmann::json;
using nlohmann::ordered_json;

ClusterSpec ClusterSpec::uniform(std::size_t count, NodeSpec node) {
  ClusterSpec c;
  for (std::size_t i = 0; i < count; ++i) {
    NodeSpec n = node;
    n.name = "node" + std::to_string(i + 1);
    c.nodes.push_back(n);
  }
  return c;
}

ClusterSpec ClusterSpec::desk_default() { return uniform(7, NodeSpec{}); }

ClusterSpec ClusterSpec::unbounded_node() {
  ClusterSpec c = uniform(1, NodeSpec{"", 1e12, 1e12, 1e12});
  c.fast.capacity = 0;
  return c;
}

void check(const ClusterSpec& c) {
  if (c.nodes.empty()) throw ConfigError("cluster needs at least one node");
  for (const auto& n : c.nodes) {
    if (!(n.memory > 0) || !(n.storage > 0) || !(n.cpu > 0)) {
      throw ConfigError("node " + n.name + " needs positive memory, storage and cpu");
    }
  }
  if (!(c.queue_latency >= 0) || !std::isfinite(c.queue_latency)) throw ConfigError("queue latency must be >= 0");
  for (const StorageTier* t : {&c.fast, &c.cloud}) {
    if (!(t->capacity >= 0) || !(t->throughput > 0) || !(t->latency >= 0)) {
      throw ConfigError("storage tiers need capacity >= 0, throughput > 0, latency >= 0");
    }
  }
}

void check(const CostModel& c) {
  for (const StepCost* s : {&c.retrieve, &c.slice, &c.prepare, &c.store}) {
    if (!(s->throughput > 0) || !(s->alpha > 0) || !(s->cpu > 0)) {
      throw ConfigError("step throughput, alpha and cpu must be positive");
    }
    if (!(s->overhead >= 0) || !(s->base >= 0) || !(s->expansion >= 0)) {
      throw ConfigError("step overhead, base and expansion must be non-negative");
    }
  }
  if (!(c.publish_overhead >= 0)) throw ConfigError("publish_overhead must be non-negative");
  if (!(c.legacy_kappa > 0) || !(c.legacy_base >= 0) || !(c.legacy_threads >= 1)) {
    throw ConfigError("legacy coefficients out of range");
  }
  if (!(c.noise >= 0 && c.noise <= 0.5)) throw ConfigError("noise amplitude must lie in [0, 0.5]");
  if (!(c.restart_penalty >= 0) || c.max_restarts < 0) throw ConfigError("restart settings out of range");
}

namespace {

ordered_json tier_json(const StorageTier& t) {
  return {{"capacity", t.capacity}, {"throughput", t.throughput}, {"latency", t.latency}};
}

ordered_json step_json(const StepCost& s) {
  return {{"throughput", s.throughput}, {"overhead", s.overhead}, {"alpha", s.alpha},
          {"base", s.base},             {"cpu", s.cpu},           {"expansion", s.expansion}};
}

json parse(std::string_view text, const char* what) {
  try {
    json j = json::parse(text.begin(), text.end());
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

StorageTier read_tier(const json& j, StorageTier t) {
  read(j, "capacity", t.capacity);
  read(j, "throughput", t.throughput);
  read(j, "latency", t.latency);
  return t;
}

StepCost read_step(const json& j, StepCost s) {
  read(j, "throughput", s.throughput);
  read(j, "overhead", s.overhead);
  read(j, "alpha", s.alpha);
  read(j, "base", s.base);
  read(j, "cpu", s.cpu);
  read(j, "expansion", s.expansion);
  return s;
}

}  // namespace

std::string serialize_cluster(const ClusterSpec& c) {
  ordered_json j;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : c.nodes) {
    nodes.push_back({{"name", n.name}, {"memory", n.memory}, {"storage", n.storage}, {"cpu", n.cpu}});
  }
  j["nodes"] = nodes;
  j["queue_latency"] = c.queue_latency;
  j["fast"] = tier_json(c.fast);
  j["cloud"] = tier_json(c.cloud);
  return j.dump(2) + "\n";
}

// Missing keys keep their desk defaults.
ClusterSpec parse_cluster(std::string_view text) {
  const json j = parse(text, "cluster spec");
  ClusterSpec c = ClusterSpec::desk_default();
  if (j.contains("nodes")) {
    if (!j["nodes"].is_array()) throw ConfigError("cluster nodes must be a list");
    c.nodes.clear();
    for (const auto& item : j["nodes"]) {
      NodeSpec n;
      n.name = "node" + std::to_string(c.nodes.size() + 1);
      read(item, "name", n.name);
      read(item, "memory", n.memory);
      read(item, "storage", n.storage);
      read(item, "cpu", n.cpu);
      c.nodes.push_back(n);
    }
  }
  read(j, "queue_latency", c.queue_latency);
  if (j.contains("fast")) c.fast = read_tier(j["fast"], c.fast);
  if (j.contains("cloud")) c.cloud = read_tier(j["cloud"], c.cloud);
  check(c);
  return c;
}

std::string serialize_cost_model(const CostModel& c) {
  ordered_json j;
  j["retrieve"] = step_json(c.retrieve);
  j["slice"] = step_json(c.slice);
  j["prepare"] = step_json(c.prepare);
  j["store"] = step_json(c.store);
  j["publish_overhead"] = c.publish_overhead;
  j["legacy_kappa"] = c.legacy_kappa;
  j["legacy_base"] = c.legacy_base;
  j["legacy_threads"] = c.legacy_threads;
  j["noise"] = c.noise;
  j["seed"] = c.seed;
  j["restart_penalty"] = c.restart_penalty;
  j["max_restarts"] = c.max_restarts;
  return j.dump(2) + "\n";
}

CostModel parse_cost_model(std::string_view text) {
  const json j = parse(text, "cost model");
  CostModel c;
  if (j.contains("retrieve")) c.retrieve = read_step(j["retrieve"], c.retrieve);
  if (j.contains("slice")) c.slice = read_step(j["slice"], c.slice);
  if (j.contains("prepare")) c.prepare = read_step(j["prepare"], c.prepare);
  if (j.contains("store")) c.store = read_step(j["store"], c.store);
  read(j, "publish_overhead", c.publish_overhead);
  read(j, "legacy_kappa", c.legacy_kappa);
  read(j, "legacy_base", c.legacy_base);
  read(j, "legacy_threads", c.legacy_threads);
  read(j, "noise", c.noise);
  read(j, "seed", c.seed);
  read(j, "restart_penalty", c.restart_penalty);
  read(j, "max_restarts", c.max_restarts);
  check(c);
  return c;
}

std::size_t SimWorkload::machine_records(std::size_t m) const {
  const auto total = static_cast<std::size_t>(n);
  if (machines == 0 || m >= machines) return 0;
  return total / machines + (m < total % machines ? 1 : 0);
}

std::size_t SimWorkload::machine_of(std::size_t record) const {
  const auto total = static_cast<std::size_t>(n);
  const std::size_t q = total / machines, r = total % machines;
  // The first r machines hold q + 1 records.
  if (record < r * (q + 1)) return record / (q + 1);
  return r + (record - r * (q + 1)) / q;
}

}  // namespace semcloud::sim
