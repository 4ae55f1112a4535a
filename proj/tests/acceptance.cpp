// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 when
// any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/stages.hpp"
#include "oracle/naive_grounder.hpp"
#include "semcloud/common/seed.hpp"
#include "semcloud/datalog.hpp"
#include "semcloud/etl.hpp"
#include "semcloud/learning.hpp"
#include "semcloud/optimizer.hpp"
#include "semcloud/pipeline_kg.hpp"
#include "semcloud/rules.hpp"
#include "semcloud/simulator.hpp"
#include "support/rule_fixtures.hpp"

using namespace semcloud;
namespace fs = std::filesystem;

namespace {

const std::string kData = SEMCLOUD_DATA_DIR;
const std::string kCli = SEMCLOUD_CLI;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("semcloud_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 1 -------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(sub_seed(1, "acceptance/oracle"));
  const auto registry = fixtures::analytic_registry();
  int equal = 0;
  std::size_t derived = 0;
  for (int k = 0; k < 25; ++k) {
    const datalog::FactSet edb = fixtures::random_corpus_edb(rng, 50);
    if (edb.size() > 50) return {false, "generator produced " + std::to_string(edb.size()) + " atoms"};
    const auto fast = datalog::evaluate(rules::corpus(), edb, registry);
    const auto slow = oracle::naive_evaluate(rules::corpus(), edb, registry);
    if (fast == slow) ++equal;
    derived += fast.size() - edb.size();
  }
  const double t = seconds_since(start);
  return {equal == 25 && t < 5.0, std::to_string(equal) + "/25 EDBs equal, " + std::to_string(derived) +
                                      " derived atoms, " + fmt(t, 3) + " s"};
}

// 2 -------------------------------------------------------------------------

Outcome rule3_contract() {
  std::mt19937_64 rng(sub_seed(1, "acceptance/contract"));
  std::uniform_real_distribution<double> e(0, 1);
  const auto registry = fixtures::analytic_registry();
  int ok = 0;
  std::set<rules::Strategy> seen;
  std::string first_failure;
  for (int k = 0; k < 100; ++k) {
    const double n = std::round(std::pow(10.0, 3 + 3 * e(rng)));
    const double v = std::round(n * (200 + 4800 * e(rng)) / 1e4) / 100;
    const std::string id = "p" + std::to_string(k);
    const auto cloud = fixtures::random_cloud(rng);
    const auto run = rules::run_corpus(
        kg::to_facts(fixtures::sized_pipeline(kData, id, n, v), cloud, fixtures::prior_run(id, n, v, rng)), cloud,
        registry);
    bool good = run.fired.size() == 1 && run.configurations.size() == 1 && run.estimates.size() == 1;
    if (good) {
      const auto& c = run.configurations[0];
      const auto& est = run.estimates[0];
      good = c.mrs <= est.ms && c.mrp <= est.mp && c.ns <= c.nc && c.nc <= n;
      seen.insert(run.fired[0]);
    }
    if (good) ++ok;
    else if (first_failure.empty()) first_failure = " first failure " + id;
  }
  return {ok == 100, std::to_string(ok) + "/100 pipelines satisfy the contract, " + std::to_string(seen.size()) +
                         " distinct branches" + first_failure};
}

// 3, 4 ---------------------------------------------------------------------

std::vector<PilotRunRecord> estimation_records(double noise, std::size_t sizes, std::size_t seeds) {
  sim::PilotPlan plan;
  plan.configs = {{RunKind::Estimation, 1, 1, StorageMode::Fast}};
  for (std::size_t s = 1; s <= seeds; ++s) plan.seeds.push_back(s);
  for (std::size_t k = 1; k <= sizes; ++k) plan.sizes.push_back(std::round(200000.0 * k / sizes));
  sim::CostModel cost = sim::CostModel::desk_default();
  cost.noise = noise;
  cost.seed = sub_seed(1, "acceptance/pilot");
  return sim::collect_pilot_stats(plan, sim::ClusterSpec::desk_default(), cost).records;
}

learn::Dataset estimation_dataset(const std::vector<PilotRunRecord>& records, const learn::ExternalSignature& sig) {
  const auto& columns = pilot_columns();
  std::vector<std::string> features;
  for (const auto& p : sig.params) {
    if (std::find(columns.begin(), columns.end(), p) != columns.end()) features.push_back(p);
  }
  return learn::make_dataset(records, features, sig.target, RunKind::Estimation);
}

Outcome learning_accuracy() {
  const auto start = Clock::now();
  const auto records = estimation_records(0.05, 100, 5);
  bool pass = records.size() >= 500;
  std::ostringstream detail;
  detail << records.size() << " rows;";
  for (const auto& sig : learn::model_signatures()) {
    if (sig.kind != RunKind::Estimation) continue;
    const learn::Dataset data = estimation_dataset(records, sig);
    double best = std::numeric_limits<double>::infinity();
    double polyr = best;
    for (learn::Method m : {learn::Method::PolyR, learn::Method::MLP, learn::Method::KNN}) {
      const auto g = learn::grid_search(m, learn::default_grid(m), data, sub_seed(1, "acceptance/learn/" + sig.name));
      best = std::min(best, g.report.nmae);
      if (m == learn::Method::PolyR) polyr = g.report.nmae;
    }
    pass = pass && polyr <= 0.10 && best <= 0.10;
    detail << " " << sig.target << " polyr=" << fmt(polyr, 3) << " best=" << fmt(best, 3);
  }
  const double t = seconds_since(start);
  pass = pass && t < 120;
  detail << "; " << fmt(t, 3) << " s";
  return {pass, detail.str()};
}

Outcome minimal_training_data() {
  const auto records = estimation_records(0.02, 100, 5);
  const auto* sig = learn::find_signature("func_ms");
  const learn::Dataset data = estimation_dataset(records, *sig);
  const std::vector<double> fractions{0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
  auto min_fraction = [&](learn::Method m) {
    const auto g = learn::grid_search(m, learn::default_grid(m), data, sub_seed(1, "acceptance/minfrac/grid"));
    const auto sweep =
        learn::min_train_fraction_sweep(m, g.best, data, 0.10, fractions, sub_seed(1, "acceptance/minfrac"), 5);
    return sweep.min_fraction.value_or(std::numeric_limits<double>::infinity());
  };
  const double polyr = min_fraction(learn::Method::PolyR);
  const double mlp = min_fraction(learn::Method::MLP);
  return {polyr <= mlp && polyr <= 0.25,
          "target ms, noise 2%: polyr " + fmt(polyr) + ", mlp " + fmt(mlp) + " (not reached = inf)"};
}

// 5 -------------------------------------------------------------------------

Outcome gradient_check() {
  const auto start = Clock::now();
  std::mt19937_64 rng(sub_seed(1, "acceptance/gradient"));
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  for (int point = 0; point < 10; ++point) {
    learn::MLPModel m = learn::init_mlp(3, {10, 9}, 1000 + static_cast<std::uint64_t>(point));
    // move away from the initialization so each point is a random parameter vector
    Eigen::VectorXd theta = learn::mlp_parameters(m);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += 0.1 * u(rng);
    learn::set_mlp_parameters(m, theta);
    Eigen::MatrixXd Z(24, 3);
    Eigen::VectorXd t(24);
    for (int r = 0; r < 24; ++r) {
      for (int c = 0; c < 3; ++c) Z(r, c) = u(rng);
      t(r) = u(rng);
    }
    const Eigen::VectorXd g = learn::mlp_gradient(m, Z, t);
    Eigen::VectorXd fd(theta.size());
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd p = theta;
      p(i) += h;
      learn::set_mlp_parameters(m, p);
      const double up = learn::mlp_loss(m, Z, t);
      p(i) -= 2 * h;
      learn::set_mlp_parameters(m, p);
      const double down = learn::mlp_loss(m, Z, t);
      fd(i) = (up - down) / (2 * h);
    }
    learn::set_mlp_parameters(m, theta);
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), fd.norm()));
  }
  const double t = seconds_since(start);
  return {worst < 1e-4 && t < 10, "worst relative error " + fmt(worst, 3) + " over 10 points, " + fmt(t, 3) + " s"};
}

// 6 -------------------------------------------------------------------------

// Reference enumeration with the documented tie-break: lowest time, then
// larger ns, then larger nc.
opt::OptResult enumerate(const opt::TimeModel& model, const opt::SlicingQuery& q, const opt::SearchSpace& space) {
  opt::OptResult best;
  bool found = false;
  for (std::size_t i = 0; i < space.nc_count(); ++i) {
    for (std::size_t j = 0; j < space.ns_count(); ++j) {
      const auto p = space.at(i, j);
      if (!p) continue;
      const double t = model(q, p->first, p->second);
      ++best.evaluations;
      const bool better = !found || t < best.predicted_time ||
                          (t == best.predicted_time &&
                           (p->second > best.ns || (p->second == best.ns && p->first > best.nc)));
      if (better) {
        found = true;
        best.nc = p->first;
        best.ns = p->second;
        best.predicted_time = t;
      }
    }
  }
  return best;
}

Outcome optimizer_correctness() {
  sim::CostModel cost = sim::CostModel::desk_default();
  const auto cluster = sim::ClusterSpec::desk_default();
  const opt::TimeModel simulated = sim::simulated_time_model(cluster, cost, 1250, 45);
  const opt::TimeModel bumpy([](const opt::SlicingQuery& q, double nc, double ns) {
    return std::round(1000 * (q.n / nc * 0.01 + nc / ns * 0.02 + ns * 1e-4)) / 1000;  // plenty of ties
  });

  int cases = 0;
  int equal = 0;
  std::size_t largest = 0;
  for (double n : {20000.0, 100000.0, 200000.0}) {
    const opt::SlicingQuery q{n * 1250 / 1e6, n, 1, 1};
    for (int steps : {8, 16, 32, 50}) {
      const opt::SearchSpace space = opt::SearchSpace::desk_default(n, steps);
      largest = std::max(largest, space.nc_count() * space.ns_count());
      for (const opt::TimeModel* model : {&simulated, &bumpy}) {
        const auto a = opt::optimize_slicing(*model, q, space);
        const auto b = enumerate(*model, q, space);
        ++cases;
        if (a.nc == b.nc && a.ns == b.ns && a.predicted_time == b.predicted_time) ++equal;
      }
    }
  }

  const double n = 200000;
  const opt::SlicingQuery q{n * 1250 / 1e6, n, 1, 1};
  const opt::SearchSpace space = opt::SearchSpace::desk_default(n);
  const auto best = opt::optimize_slicing(simulated, q, space);
  std::vector<double> ns_values;
  for (std::size_t i = 0; i < space.nc_count(); ++i) {
    for (std::size_t j = 0; j < space.ns_count(); ++j) {
      if (const auto p = space.at(i, j); p && p->first == best.nc) ns_values.push_back(p->second);
    }
  }
  const auto curve = opt::sweet_spot_curve(simulated, q, best.nc, ns_values);
  const std::size_t k = opt::curve_minimum(curve);
  const bool interior = k > 0 && k + 1 < curve.size() && curve.front().predicted_time > curve[k].predicted_time &&
                        curve.back().predicted_time > curve[k].predicted_time;
  return {equal == cases && largest <= 2500 && interior,
          std::to_string(equal) + "/" + std::to_string(cases) + " grids (up to " + std::to_string(largest) +
              " points) match enumeration; curve at nc=" + fmt(best.nc, 6) + " has minimum at ns=" +
              fmt(curve[k].ns, 6) + " (" + fmt(curve.front().predicted_time) + " / " + fmt(curve[k].predicted_time) +
              " / " + fmt(curve.back().predicted_time) + " s)"};
}

// 7, 8 ----------------------------------------------------------------------

struct Loop {
  app::ProjectConfig config;
  kg::PipelineGraph configured;
  double seconds = 0;
};

const Loop& desk_loop() {
  static const Loop loop = [] {
    const auto start = Clock::now();
    Loop l;
    l.config.out = scratch("loop").string();
    app::run_pilot(l.config);
    app::run_learn(l.config);
    app::run_configure(l.config, kData + "/pipelines/desk.json");
    l.configured = kg::load_pipeline(l.config.path("configured/desk.json"));
    l.seconds = seconds_since(start);
    return l;
  }();
  return loop;
}

Outcome configuration_quality() {
  const auto start = Clock::now();
  const Loop& loop = desk_loop();
  const sim::DeploySettings s = sim::settings_from(loop.configured);
  sim::CostModel exact = loop.config.cost;
  exact.noise = 0;
  const opt::TimeModel simulated = sim::simulated_time_model(loop.config.cluster, exact, s.record_bytes,
                                                             static_cast<std::size_t>(loop.config.workload.machines));
  const opt::SlicingQuery q{s.n * s.record_bytes / 1e6, s.n, 0, 0};
  const opt::SearchSpace space = opt::SearchSpace::desk_default(s.n);
  const opt::OptResult best = enumerate(simulated, q, space);
  const double chosen = simulated(q, s.nc, s.ns);
  const double ratio = chosen / best.predicted_time;
  const double t = seconds_since(start);
  return {ratio <= 1.10 && t < 300,
          "configured (" + fmt(s.nc, 6) + ", " + fmt(s.ns, 6) + ") " + fmt(chosen) + " s vs grid best (" +
              fmt(best.nc, 6) + ", " + fmt(best.ns, 6) + ") " + fmt(best.predicted_time) + " s, ratio " +
              fmt(ratio) + ", " + fmt(t, 3) + " s"};
}

Outcome legacy_comparison() {
  const Loop& loop = desk_loop();
  const app::VolumeSweep sweep = app::volume_sweep(loop.configured, loop.config);
  const auto& rows = sweep.rows;
  if (rows.size() < 4) return {false, "only " + std::to_string(rows.size()) + " volumes"};

  // least-squares line of legacy peak memory against volume
  double mx = 0, my = 0;
  for (const auto& r : rows) {
    mx += r.volume;
    my += r.memory_b;
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& r : rows) {
    sxx += (r.volume - mx) * (r.volume - mx);
    sxy += (r.volume - mx) * (r.memory_b - my);
    syy += (r.memory_b - my) * (r.memory_b - my);
  }
  const double slope = sxy / sxx;
  const double r2 = sxy * sxy / (sxx * syy);

  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.memory_a);
    hi = std::max(hi, r.memory_a);
  }
  const double spread = (hi - lo) / lo;
  const double ratio = rows.back().time_ratio();
  return {ratio <= 0.6 && slope > 0 && r2 > 0.9 && spread < 0.10,
          std::to_string(rows.size()) + " volumes up to " + fmt(rows.back().volume) + " MB: time ratio " + fmt(ratio) +
              ", legacy slope " + fmt(slope) + " MB/MB (R2 " + fmt(r2, 5) + "), distributed node peak spread " +
              fmt(100 * spread, 3) + "%"};
}

// 9 -------------------------------------------------------------------------

Outcome etl_conservation() {
  etl::WorkloadSpec spec;
  spec.machines = 12;
  spec.duration = 20;
  const etl::Workload w = etl::generate_workload(spec);
  std::set<etl::SourceFormat> formats;
  std::vector<std::string> all_absent;
  std::vector<std::vector<etl::UnifiedRecord>> mapped;
  std::size_t rejects = 0;
  for (const auto& s : w.sources) {
    formats.insert(s.descriptor.format);
    const auto raw = etl::ingest(s.descriptor.format, s.content);
    const auto m = etl::map_to_unified(raw.records, s.descriptor, w.schema);
    rejects += raw.rejects.size() + m.rejects.size();
    all_absent.insert(all_absent.end(), s.descriptor.absent.begin(), s.descriptor.absent.end());
    mapped.push_back(m.records);
  }
  for (auto& records : mapped) {
    for (auto& r : records) r = etl::without(r, w.schema, all_absent);
    std::sort(records.begin(), records.end());
  }
  bool agree = formats.size() == 3 && rejects == 0;
  for (std::size_t k = 1; k < mapped.size(); ++k) agree = agree && mapped[k] == mapped[0];

  auto truth = w.records;
  std::sort(truth.begin(), truth.end());
  bool conserved = true;
  bool pure = true;
  for (auto [nc, ns] : {std::pair<std::size_t, std::size_t>{1, 1}, {7, 3}, {50, 50}, {240, 17}, {100000, 100000}}) {
    std::vector<etl::UnifiedRecord> all;
    for (const auto& slice : etl::slice_records(w.records, nc, ns)) {
      pure = pure && slice.records.size() <= ns;
      for (const auto& r : slice.records) {
        pure = pure && r.machine_id == slice.machine_id;
        all.push_back(r);
      }
    }
    std::sort(all.begin(), all.end());
    conserved = conserved && all == truth;
  }
  return {agree && conserved && pure, std::to_string(w.records.size()) + " records over " +
                                          std::to_string(w.sources.size()) + " sources; sources agree " +
                                          (agree ? "yes" : "no") + ", slicing conserves " +
                                          (conserved ? "yes" : "no") + ", slices pure " + (pure ? "yes" : "no")};
}

// 10 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool run_chain(const fs::path& out) {
  const std::string base = "\"" + kCli + "\" --seed 11 -o \"" + out.string() + "\" ";
  const std::vector<std::string> steps{
      "gen",
      "pilot",
      "learn",
      "configure \"" + kData + "/pipelines/desk.json\"",
      "simulate \"" + (out / "configured/desk.json").string() + "\"",
      "report",
  };
  for (const auto& step : steps) {
    if (std::system((base + step + " > /dev/null 2>&1").c_str()) != 0) return false;
  }
  return true;
}

Outcome reproducibility() {
  const fs::path a = scratch("chain_a");
  const fs::path b = scratch("chain_b");
  if (!run_chain(a) || !run_chain(b)) return {false, "CLI chain failed"};
  std::size_t files = 0;
  std::vector<std::string> differing;
  std::set<std::string> names;
  for (const fs::path& root : {a, b}) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) names.insert(fs::relative(entry.path(), root).string());
    }
  }
  for (const auto& name : names) {
    if (name == "reports/timings.csv") continue;  // wall-clock only
    ++files;
    if (!fs::exists(a / name) || !fs::exists(b / name) || slurp(a / name) != slurp(b / name)) differing.push_back(name);
  }
  std::string detail = std::to_string(files - differing.size()) + "/" + std::to_string(files) + " data files identical";
  if (!differing.empty()) detail += ", first difference " + differing.front();
  return {differing.empty() && files > 0, detail};
}

// 11 ------------------------------------------------------------------------

Outcome nmae_examples() {
  const std::vector<double> pred{1, 3}, truth{2, 2};
  const double half = learn::nmae(pred, truth);
  const double zero = learn::nmae(truth, truth);
  const std::vector<double> p3{3, 9}, t3{6, 6};
  const double scaled = learn::nmae(p3, t3);
  return {half == 0.5 && zero == 0.0 && scaled == half,
          "nmae([1,3],[2,2]) = " + fmt(half) + ", nmae(x,x) = " + fmt(zero) + ", scaled = " + fmt(scaled)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"datalog oracle equivalence", oracle_equivalence},
      {"rule_3 contract", rule3_contract},
      {"learning accuracy", learning_accuracy},
      {"minimal training data trend", minimal_training_data},
      {"gradient check", gradient_check},
      {"optimizer correctness", optimizer_correctness},
      {"end-to-end configuration quality", configuration_quality},
      {"legacy comparison", legacy_comparison},
      {"ETL conservation", etl_conservation},
      {"reproducibility", reproducibility},
      {"nmae unit suite", nmae_examples},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  fs::remove_all(fs::temp_directory_path() / ("semcloud_acceptance_" + std::to_string(::getpid())));
  return failed == 0 ? 0 : 1;
}
