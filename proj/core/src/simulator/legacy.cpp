#include <cmath>
#include <random>

#include "semcloud/errors.hpp"
#include "semcloud/simulator/run.hpp"

namespace semcloud::sim {

RunTrace run_legacy(const SimWorkload& workload, const NodeSpec& node, const ClusterSpec& cluster,
                    const CostModel& cost, StorageMode mode, bool record_series) {
  check(cost);
  if (!(workload.n >= 0) || !(workload.record_bytes > 0)) throw InvalidInput("legacy workload needs n >= 0");
  RunTrace trace;
  trace.label = "legacy";
  trace.nodes = {node.name.empty() ? "legacy" : node.name};
  const double n = std::floor(workload.n);
  const double v = n * workload.record_bytes / 1e6;

  std::mt19937_64 rng(cost.seed);
  auto draw = [&] {
    if (cost.noise == 0) return 1.0;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 1.0 + cost.noise * (2 * u - 1);
  };

  const double base = cost.legacy_base;
  const double top = base + cost.legacy_kappa * v * (n > 0 ? draw() : 1.0);
  if (top > node.memory) {
    throw SimulatedOutOfMemory("legacy process needs " + std::to_string(top) + " MB on a " +
                               std::to_string(node.memory) + " MB node");
  }

  double retrieve = 0, prepare = 0, store = 0;
  if (n > 0) {
    retrieve = (cost.retrieve.overhead + n / cost.retrieve.throughput) * draw();
    prepare = (cost.prepare.overhead + n / (cost.prepare.throughput * cost.legacy_threads)) * draw();
    const StorageTier& tier = cluster.tier(mode);
    store = (tier.latency + cost.prepare.expansion * v / tier.throughput) * draw();
  }
  const double prepare_cpu = cost.prepare.cpu * cost.legacy_threads;
  const double t1 = retrieve, t2 = t1 + prepare, t3 = t2 + store;

  auto set = [&](Step s, double start, double end, double storage) {
    auto& st = trace.steps[static_cast<std::size_t>(s)];
    st.start = start;
    st.end = end;
    st.busy = end - start;
    st.messages = n > 0 ? 1 : 0;
    st.storage = storage;
  };
  set(Step::Retrieve, 0, t1, cost.retrieve.expansion * v);
  set(Step::Prepare, t1, t2, cost.prepare.expansion * v);
  set(Step::Store, t2, t3, cost.store.expansion * v);
  trace.steps[static_cast<std::size_t>(Step::Prepare)].peak_instance_memory = top;

  trace.consumed_time = t3;
  trace.cpu_integral = retrieve * cost.retrieve.cpu + prepare * prepare_cpu + store * cost.store.cpu;
  trace.peak_memory = {n > 0 ? top : base};
  if (record_series) {
    // Memory ramps with the processed volume through retrieve and prepare.
    trace.memory = {Series{{0, base}, {t2, top}, {t3, top}}};
    if (n == 0) trace.memory = {Series{{0, base}, {0, base}}};
    trace.cpu = {Series{{0, cost.retrieve.cpu},
                        {t1, cost.retrieve.cpu},
                        {t1, prepare_cpu},
                        {t2, prepare_cpu},
                        {t2, cost.store.cpu},
                        {t3, cost.store.cpu},
                        {t3, 0}}};
  }
  return trace;
}

}  // namespace semcloud::sim
