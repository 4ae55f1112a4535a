#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "semcloud/errors.hpp"
#include "semcloud/pipeline_kg/document.hpp"
#include "semcloud/simulator.hpp"

using namespace semcloud;
using namespace semcloud::sim;

namespace {

DeploySettings settings(double n, double nc, double ns) {
  DeploySettings s;
  s.n = n;
  s.nc = nc;
  s.ns = ns;
  return s;
}

DeployOptions need_policy() {
  DeployOptions o;
  o.policy = ReservationPolicy::Need;
  return o;
}

RunResult simulate(double n, double nc, double ns, const CostModel& cost = {}, DeployOptions options = need_policy(),
                   std::size_t machines = 45, RunOptions run_options = {}) {
  const auto plan = deploy(settings(n, nc, ns), ClusterSpec::desk_default(), cost, options);
  return run(plan, SimWorkload{n, 1250, machines}, run_options);
}

double total_trapezoid(const std::vector<Series>& series) {
  double sum = 0;
  for (const auto& s : series) sum += trapezoid(s);
  return sum;
}

}  // namespace

TEST(SimCluster, JsonRoundTripAndChecks) {
  ClusterSpec c = ClusterSpec::uniform(3, NodeSpec{"", 2048, 100, 3000});
  c.queue_latency = 0.01;
  EXPECT_EQ(parse_cluster(serialize_cluster(c)), c);
  CostModel m;
  m.noise = 0.1;
  m.prepare.overhead = 0.5;
  EXPECT_EQ(parse_cost_model(serialize_cost_model(m)), m);
  EXPECT_EQ(parse_cost_model("{}"), CostModel{});
  EXPECT_THROW(parse_cluster(R"({"nodes": []})"), ConfigError);
  EXPECT_THROW(parse_cost_model(R"({"noise": 0.6})"), ConfigError);
  EXPECT_THROW(parse_cost_model(R"({"slice": {"throughput": 0}})"), ConfigError);
  EXPECT_THROW(parse_cost_model("[1]"), ConfigError);
  EXPECT_EQ(ClusterSpec::desk_default().nodes.size(), 7u);
}

TEST(SimCluster, MachineMajorLayout) {
  for (double n : {0.0, 1.0, 44.0, 45.0, 1000.0, 1003.0}) {
    const SimWorkload w{n, 1250, 45};
    std::vector<std::size_t> owner;
    for (std::size_t m = 0; m < w.machines; ++m) owner.insert(owner.end(), w.machine_records(m), m);
    ASSERT_EQ(owner.size(), static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < owner.size(); ++r) EXPECT_EQ(w.machine_of(r), owner[r]);
  }
}

TEST(SimDeploy, PrepareInstancesFollowThroughputRatio) {
  kg::PipelineGraph g = kg::load_pipeline(SEMCLOUD_DATA_DIR "/pipelines/p1.json");
  g = kg::apply_configuration(g, kg::ResourceConfiguration{"p1", 20000, 2000, StorageMode::Fast, 300, 200});
  for (auto& t : g.tasks) {
    if (t.kind == kg::TaskKind::Slice) t.required_time = 1.0;
    if (t.kind == kg::TaskKind::Prepare) t.required_time = 3.0;
  }
  const ExecutionPlan plan = deploy(g, ClusterSpec::desk_default(), CostModel{});
  EXPECT_EQ(plan.prepare_demand, 3u);
  EXPECT_EQ(plan.count(Step::Prepare), 3u);
  EXPECT_EQ(plan.reservation(Step::Slice), 300);
  EXPECT_EQ(plan.reservation(Step::Prepare), 200);
  EXPECT_EQ(plan.settings.n, 116640);
  EXPECT_NEAR(plan.settings.record_bytes, 145e6 / 116640, 1e-9);
}

TEST(SimDeploy, SingleNodeCoLocates) {
  const auto plan = deploy(settings(1000, 100, 10), ClusterSpec::uniform(1, NodeSpec{}), CostModel{}, need_policy());
  EXPECT_GE(plan.count(Step::Prepare), 1u);
  for (const auto& i : plan.instances) EXPECT_EQ(i.node, 0u);
}

TEST(SimDeploy, ReservationsNeverExceedNodeMemory) {
  for (double ns : {10.0, 1000.0, 20000.0, 200000.0}) {
    const auto plan = deploy(settings(200000, 200000, ns), ClusterSpec::desk_default(), CostModel{}, need_policy());
    const auto reserved = plan.reserved_memory();
    for (std::size_t k = 0; k < reserved.size(); ++k) EXPECT_LE(reserved[k], plan.cluster.nodes[k].memory);
  }
}

TEST(SimDeploy, OversizedReservationIsInsufficient) {
  DeploySettings s = settings(1000, 100, 10);
  s.mrs = 5000;
  s.mrp = 10;
  try {
    deploy(s, ClusterSpec::desk_default(), CostModel{});
    FAIL() << "expected InsufficientResources";
  } catch (const InsufficientResources& e) {
    EXPECT_NE(std::string(e.what()).find("memory"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("slice"), std::string::npos);
  }
  s.mrs = 10;
  s.mrp.reset();
  EXPECT_THROW(deploy(s, ClusterSpec::desk_default(), CostModel{}), InvalidInput);
}

TEST(SimRun, EmptyWorkloadCostsOnlyQueueLatency) {
  const auto r = simulate(0, 1, 1);
  EXPECT_DOUBLE_EQ(r.trace.consumed_time, 3 * ClusterSpec::desk_default().queue_latency);
  EXPECT_TRUE(r.stored.empty());
  EXPECT_EQ(r.trace.cpu_integral, 0);
}

TEST(SimRun, SingleMessagePathMatchesClosedForm) {
  CostModel c;
  const ClusterSpec cluster = ClusterSpec::desk_default();
  const double n = 900, mb = n * 1250 / 1e6;
  const auto r = run(deploy(settings(n, n, n), cluster, c, need_policy()), SimWorkload{n, 1250, 1});
  const double lambda = cluster.queue_latency;
  const double expected = (c.retrieve.overhead + n / c.retrieve.throughput) +
                          (c.slice.overhead + n / c.slice.throughput + c.publish_overhead) +
                          (c.prepare.overhead + n / c.prepare.throughput) +
                          (c.store.overhead + n / c.store.throughput + cluster.fast.latency +
                           c.prepare.expansion * mb / cluster.fast.throughput) +
                          3 * lambda;
  EXPECT_NEAR(r.trace.consumed_time, expected, 1e-9);
  EXPECT_NEAR(r.record.ms, c.slice.base + c.slice.alpha * mb, 1e-9);
  EXPECT_NEAR(r.record.mp, c.prepare.base + c.prepare.alpha * mb, 1e-9);
  EXPECT_NEAR(r.record.spr, c.prepare.expansion * mb, 1e-9);
}

TEST(SimRun, SameSeedSameTrace) {
  CostModel c;
  c.noise = 0.1;
  c.seed = 42;
  const auto a = simulate(50000, 5000, 500, c);
  const auto b = simulate(50000, 5000, 500, c);
  EXPECT_EQ(a.record, b.record);
  ASSERT_EQ(a.trace.memory.size(), b.trace.memory.size());
  for (std::size_t k = 0; k < a.trace.memory.size(); ++k) {
    ASSERT_EQ(a.trace.memory[k].size(), b.trace.memory[k].size());
    for (std::size_t i = 0; i < a.trace.memory[k].size(); ++i) {
      EXPECT_EQ(a.trace.memory[k][i].t, b.trace.memory[k][i].t);
      EXPECT_EQ(a.trace.memory[k][i].value, b.trace.memory[k][i].value);
    }
  }
  c.seed = 43;
  EXPECT_NE(simulate(50000, 5000, 500, c).record.total_time, a.record.total_time);
}

TEST(SimRun, DoublingSliceInstancesHalvesSlicePhase) {
  CostModel c;
  c.slice.throughput = 2000;  // slice-bound
  c.prepare.throughput = 1e6;
  DeployOptions one = need_policy();
  DeployOptions two = one;
  two.slice_instances = 2;
  const auto a = simulate(100000, 2000, 500, c, one);
  const auto b = simulate(100000, 2000, 500, c, two);
  const double lambda = ClusterSpec::desk_default().queue_latency;
  const double half = a.record.ts / 2;
  EXPECT_NEAR(b.record.ts, half, 0.01 * half + 2 * lambda);
}

TEST(SimRun, QueuesConserveMessagesAndRecords) {
  const double n = 20011;
  const auto r = simulate(n, 1700, 130, CostModel{}, need_policy(), 7);
  for (const auto& ch : r.trace.channels) {
    EXPECT_GT(ch.published, 0u);
    EXPECT_EQ(ch.published, ch.delivered);
    EXPECT_EQ(ch.delivered, ch.acknowledged);
  }
  EXPECT_EQ(r.trace.channels[1].published, r.stored.size());
  const SimWorkload w{n, 1250, 7};
  std::size_t next = 0;
  for (const auto& range : r.stored) {
    EXPECT_EQ(range.first, next);
    EXPECT_LE(range.count, 130u);
    EXPECT_EQ(w.machine_of(range.first), range.machine);
    EXPECT_EQ(w.machine_of(range.first + range.count - 1), range.machine);
    next += range.count;
  }
  EXPECT_EQ(next, static_cast<std::size_t>(n));
}

TEST(SimRun, InstanceCountChangesTimingNotOutput) {
  DeployOptions few = need_policy();
  few.prepare_instances = 1;
  DeployOptions many = need_policy();
  many.prepare_instances = 8;
  const auto a = simulate(30000, 3000, 300, CostModel{}, few);
  const auto b = simulate(30000, 3000, 300, CostModel{}, many);
  EXPECT_EQ(a.stored, b.stored);
  EXPECT_GT(a.record.total_time, 2 * b.record.total_time);
}

TEST(SimRun, DelayedConsumerLosesNothing) {
  RunOptions delayed;
  delayed.start_delay[static_cast<std::size_t>(Step::Prepare)] = 10;
  const auto a = simulate(30000, 3000, 300);
  const auto b = simulate(30000, 3000, 300, CostModel{}, need_policy(), 45, delayed);
  EXPECT_EQ(a.stored, b.stored);
  EXPECT_GE(b.trace.step(Step::Prepare).start, 10);
  EXPECT_GT(b.record.total_time, a.record.total_time);
}

TEST(SimRun, TraceTotalsMatchSeries) {
  CostModel c;
  c.noise = 0.2;
  const auto r = simulate(60000, 6000, 400, c);
  EXPECT_NEAR(total_trapezoid(r.trace.cpu), r.trace.cpu_integral, 0.01 * r.trace.cpu_integral);
  for (std::size_t k = 0; k < r.trace.memory.size(); ++k) {
    EXPECT_DOUBLE_EQ(peak(r.trace.memory[k]), r.trace.peak_memory[k]);
    for (std::size_t i = 1; i < r.trace.memory[k].size(); ++i) {
      EXPECT_LE(r.trace.memory[k][i - 1].t, r.trace.memory[k][i].t);
    }
    EXPECT_EQ(r.trace.memory[k].back().t, r.trace.consumed_time);
  }
  const auto& rec = r.record;
  EXPECT_EQ(rec.ts, r.trace.step(Step::Slice).duration());
  EXPECT_EQ(rec.tp, r.trace.step(Step::Prepare).duration());
  EXPECT_EQ(rec.ms, r.trace.step(Step::Slice).peak_instance_memory);
  EXPECT_EQ(rec.mp, r.trace.step(Step::Prepare).peak_instance_memory);
  EXPECT_EQ(rec.sst, r.trace.step(Step::Store).storage);
  EXPECT_EQ(rec.total_time, r.trace.consumed_time);
  EXPECT_EQ(check_invariants(rec), "");
}

TEST(SimRun, ReservationOverrunsRestartThenFail) {
  CostModel c;
  c.noise = 0.5;
  c.max_restarts = 1000;
  DeploySettings s = settings(20000, 2000, 200);
  s.mrs = 1000;
  s.mrp = memory_need(c, Step::Prepare, 200, 1250);  // the noise-free need: about half the draws overrun
  const auto plan = deploy(s, ClusterSpec::desk_default(), c);
  const auto r = run(plan, SimWorkload{20000, 1250, 45});
  EXPECT_GT(r.trace.step(Step::Prepare).restarts, 0u);
  EXPECT_EQ(r.trace.step(Step::Slice).restarts, 0u);
  EXPECT_LE(r.record.mp, s.mrp.value());

  s.mrp = c.prepare.base + 0.01;
  c.max_restarts = 3;
  EXPECT_THROW(run(deploy(s, ClusterSpec::desk_default(), c), SimWorkload{20000, 1250, 45}), SimulatedOutOfMemory);
}

TEST(SimRun, FastStorageCapacityIsEnforced) {
  ClusterSpec cluster = ClusterSpec::desk_default();
  cluster.fast.capacity = 10;
  const auto plan = deploy(settings(20000, 2000, 200), cluster, CostModel{}, need_policy());
  EXPECT_THROW(run(plan, SimWorkload{20000, 1250, 45}), CapacityExceeded);
  DeploySettings cloud = settings(20000, 2000, 200);
  cloud.mode = StorageMode::Cloud;
  EXPECT_NO_THROW(run(deploy(cloud, cluster, CostModel{}, need_policy()), SimWorkload{20000, 1250, 45}));
}

TEST(SimRun, NodePeakIndependentOfVolume) {
  std::vector<double> peaks;
  for (double n : {50000.0, 100000.0, 150000.0, 200000.0}) peaks.push_back(simulate(n, 5000, 600).trace.max_node_peak());
  const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
  EXPECT_LT(*hi / *lo - 1, 0.10);
}

TEST(SimLegacy, PeakIsLinearInVolume) {
  const CostModel c;
  const NodeSpec node{"big", 1e6, 1e6, 8000};
  for (double n : {10000.0, 80000.0, 200000.0}) {
    const SimWorkload w{n, 1250, 45};
    const RunTrace t = run_legacy(w, node, ClusterSpec::desk_default(), c);
    EXPECT_NEAR(t.max_node_peak(), c.legacy_base + c.legacy_kappa * w.volume(), 1e-9);
    EXPECT_NEAR(trapezoid(t.cpu.front()), t.cpu_integral, 1e-9 * t.cpu_integral);
  }
  const RunTrace empty = run_legacy(SimWorkload{0, 1250, 45}, node, ClusterSpec::desk_default(), c);
  EXPECT_EQ(empty.consumed_time, 0);
  EXPECT_EQ(empty.cpu_integral, 0);
  EXPECT_THROW(run_legacy(SimWorkload{200000, 1250, 45}, NodeSpec{"small", 512, 1e6, 8000}, ClusterSpec::desk_default(), c),
               SimulatedOutOfMemory);
}

TEST(SimCompare, RatiosAndTrend) {
  const NodeSpec node{"big", 1e6, 1e6, 8000};
  const std::vector<double> volumes{20000, 60000, 120000, 200000};
  std::vector<RunTrace> dist, legacy;
  for (double n : volumes) {
    dist.push_back(simulate(n, 5000, 600).trace);
    legacy.push_back(run_legacy(SimWorkload{n, 1250, 45}, node, ClusterSpec::desk_default(), CostModel{}));
  }
  const auto rows = compare(dist, legacy, volumes);
  ASSERT_EQ(rows.size(), volumes.size());
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LT(rows[k].time_ratio(), rows[k - 1].time_ratio());
  EXPECT_LT(rows.back().time_ratio(), 0.6);
  for (const auto& r : compare(dist, dist, volumes)) {
    EXPECT_EQ(r.memory_ratio(), 1);
    EXPECT_EQ(r.cpu_ratio(), 1);
    EXPECT_EQ(r.time_ratio(), 1);
  }
  EXPECT_THROW(compare(dist, legacy, {1.0}), InvalidInput);
  const std::string csv = format_comparison_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(SimPilot, GridProductCount) {
  PilotPlan plan;
  for (int k = 0; k < 10; ++k) plan.configs.push_back({RunKind::Configuration, 0.1 * (k + 1), 0.5});
  plan.seeds = {1, 2, 3, 4, 5};
  for (int k = 1; k <= 10; ++k) plan.sizes.push_back(1000.0 * k);
  const PilotStats stats = collect_pilot_stats(plan, ClusterSpec::desk_default(), CostModel{});
  EXPECT_EQ(stats.records.size(), 500u);
  EXPECT_TRUE(stats.failures.empty());
  EXPECT_THROW(collect_pilot_stats(PilotPlan{}, ClusterSpec::desk_default(), CostModel{}), InvalidInput);
}

TEST(SimPilot, DeskDefaultIsLargeFastAndValid) {
  CostModel c;
  c.noise = 0.05;
  const auto start = std::chrono::steady_clock::now();
  const PilotStats stats = collect_pilot_stats(PilotPlan::desk_default(), ClusterSpec::desk_default(), c);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60);
  EXPECT_GE(stats.records.size(), 500u);
  EXPECT_TRUE(stats.failures.empty());
  for (const auto& r : stats.records) {
    EXPECT_EQ(check_invariants(r), "");
    if (r.kind == RunKind::Estimation) {
      EXPECT_EQ(r.nc, r.n);
      EXPECT_EQ(r.ns, r.n);
    }
  }
}

TEST(SimPilot, RowErrorsAreCollected) {
  PilotPlan plan;
  plan.configs = {{RunKind::Configuration, 1, 1}, {RunKind::Configuration, 0.01, 0.1}};  // the first chunk overflows the node
  plan.seeds = {1};
  plan.sizes = {2000000};
  const PilotStats stats =
      collect_pilot_stats(plan, ClusterSpec::uniform(1, NodeSpec{"n", 3000, 1e5, 4000}), CostModel{});
  EXPECT_EQ(stats.records.size(), 1u);
  ASSERT_EQ(stats.failures.size(), 1u);
  EXPECT_EQ(stats.failures[0].index, 0u);
}

TEST(SimTimeModel, SweetSpotCurveIsUShaped) {
  const double n = 200000;
  const auto model = simulated_time_model(ClusterSpec::desk_default(), CostModel{}, 1250, 45);
  const opt::SlicingQuery q{250, n, 0, 0};
  const auto best = opt::optimize_slicing(model, q, opt::SearchSpace::desk_default(n));
  std::vector<double> ns;
  for (double f = 1.0 / 64; f <= 1.0; f *= 2) ns.push_back(std::round(best.nc * f));
  const auto curve = opt::sweet_spot_curve(model, q, best.nc, ns);
  const std::size_t k = opt::curve_minimum(curve);
  EXPECT_GT(k, 0u);
  EXPECT_LT(k, curve.size() - 1);
  EXPECT_GT(curve.front().predicted_time, curve[k].predicted_time);
  EXPECT_GT(curve.back().predicted_time, curve[k].predicted_time);
}
