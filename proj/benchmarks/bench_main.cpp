#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "semcloud/datalog.hpp"
#include "semcloud/etl.hpp"
#include "semcloud/learning.hpp"
#include "semcloud/optimizer.hpp"
#include "semcloud/pipeline_kg.hpp"
#include "semcloud/rules.hpp"
#include "semcloud/simulator.hpp"

using namespace semcloud;

namespace {

// Closed-form estimators and a closed-form time model, so the benchmark
// measures the engine rather than model inference.
datalog::ExternalRegistry flat_registry() {
  datalog::ExternalRegistry r;
  for (const auto& sig : learn::model_signatures()) {
    r.add(sig.name, sig.params.size(), [](std::span<const double> args) {
      double s = 16;
      for (double a : args) s += a * 1e-3;
      return s;
    });
  }
  opt::SlicingExternalsConfig config;
  config.fast = opt::TimeModel([](const opt::SlicingQuery& q, double nc, double ns) {
    return q.n / nc * 0.01 + nc / ns * 0.02 + ns * 1e-4;
  });
  return opt::register_slicing_externals(config, std::move(r));
}

void BM_ParseCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(datalog::parse_program(rules::corpus_text()));
}
BENCHMARK(BM_ParseCorpus);

void BM_PolyRFit(benchmark::State& state) {
  const auto rows = state.range(0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd X(rows, 3);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = u(rng);
    y(i) = X(i, 0) * X(i, 0) + 2 * X(i, 1) - X(i, 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(learn::fit_polyr(X, y, static_cast<int>(state.range(1))));
}
BENCHMARK(BM_PolyRFit)->Args({500, 2})->Args({500, 4})->Args({5000, 4});

void BM_OptimizeGrid(benchmark::State& state) {
  const opt::TimeModel model([](const opt::SlicingQuery& q, double nc, double ns) {
    return q.n / nc * 0.01 + nc / ns * 0.02 + ns * 1e-4;
  });
  const opt::SlicingQuery q{250, 200000, 0, 0};
  const auto space = opt::SearchSpace::desk_default(q.n, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(opt::optimize_slicing(model, q, space));
}
BENCHMARK(BM_OptimizeGrid)->Arg(16)->Arg(50);

void BM_SliceRecords(benchmark::State& state) {
  etl::WorkloadSpec spec;
  spec.duration = 200;
  const auto w = etl::generate_workload(spec);
  for (auto _ : state) benchmark::DoNotOptimize(etl::slice_records(w.records, 1000, 100));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.records.size()));
}
BENCHMARK(BM_SliceRecords);

void BM_IngestCsv(benchmark::State& state) {
  etl::WorkloadSpec spec;
  spec.formats = {etl::SourceFormat::CSV};
  const auto w = etl::generate_workload(spec);
  const auto& s = w.sources.front();
  for (auto _ : state) benchmark::DoNotOptimize(etl::ingest(s.descriptor.format, s.content));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(s.content.size()));
}
BENCHMARK(BM_IngestCsv);

void BM_SimulateRun(benchmark::State& state) {
  sim::DeploySettings s;
  s.n = static_cast<double>(state.range(0));
  s.nc = s.n / 16;
  s.ns = s.nc / 8;
  const auto cluster = sim::ClusterSpec::desk_default();
  const auto cost = sim::CostModel::desk_default();
  sim::DeployOptions options;
  options.policy = sim::ReservationPolicy::Need;
  const auto plan = sim::deploy(s, cluster, cost, options);
  sim::SimWorkload w;
  w.n = s.n;
  sim::RunOptions ro;
  ro.record_series = false;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(plan, w, ro));
}
BENCHMARK(BM_SimulateRun)->Arg(20000)->Arg(200000);

void BM_CorpusEvaluation(benchmark::State& state) {
  const auto registry = flat_registry();
  const auto graph = kg::load_pipeline(SEMCLOUD_DATA_DIR "/pipelines/desk.json");
  PilotRunRecord prior;
  prior.p = graph.id;
  prior.n = 200000;
  prior.v = 250;
  prior.ms = 300;
  prior.mp = 400;
  prior.ssl = 270;
  prior.spr = 280;
  prior.sst = 360;
  datalog::FactSet edb = kg::to_facts(graph, kg::CloudAttributes{}, prior);
  edb.merge(rules::range_facts());
  for (auto _ : state) benchmark::DoNotOptimize(datalog::evaluate(rules::corpus(), edb, registry));
}
BENCHMARK(BM_CorpusEvaluation);

}  // namespace

BENCHMARK_MAIN();
