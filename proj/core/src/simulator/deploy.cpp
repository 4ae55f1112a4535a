#include "semcloud/simulator/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semcloud/common/csv.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::sim {

std::string_view to_string(Step step) {
  switch (step) {
    case Step::Retrieve: return "retrieve";
    case Step::Slice: return "slice";
    case Step::Prepare: return "prepare";
    case Step::Store: return "store";
  }
  return "?";
}

DeploySettings settings_from(const kg::PipelineGraph& g) {
  DeploySettings s;
  s.pipeline = g.id;
  const kg::DataEntity* input = nullptr;
  for (const auto& id : g.input_data) {
    if (const auto* d = g.data_entity(id); d && d->no_records && d->volume) {
      input = d;
      break;
    }
  }
  if (!input) throw InvalidInput("pipeline " + g.id + " has no input data with hasNoRecords and hasVolume");
  s.n = *input->no_records;
  if (s.n > 0) s.record_bytes = *input->volume * 1e6 / s.n;

  const auto prepare = g.tasks_of(kg::TaskKind::Prepare);
  const auto store = g.tasks_of(kg::TaskKind::Store);
  if (prepare.empty()) throw MissingTask("pipeline " + g.id + " has no Prepare task");
  if (store.empty()) throw MissingTask("pipeline " + g.id + " has no Store task");
  const auto slice = g.tasks_of(kg::TaskKind::Slice);
  if (slice.empty()) {
    s.nc = s.ns = s.n;
  } else {
    if (!slice[0]->chunk_size || !slice[0]->slice_size) {
      throw InvalidInput("slice task " + slice[0]->id + " has no chunk/slice size configured");
    }
    s.nc = *slice[0]->chunk_size;
    s.ns = *slice[0]->slice_size;
    s.mrs = slice[0]->memory_reservation;
    s.ts = slice[0]->required_time;
  }
  s.mrp = prepare[0]->memory_reservation;
  s.tp = prepare[0]->required_time;
  if (store[0]->storage_mode) s.mode = *store[0]->storage_mode;
  return s;
}

double memory_need(const CostModel& cost, Step step, double records, double record_bytes) {
  const StepCost* c = nullptr;
  switch (step) {
    case Step::Retrieve: c = &cost.retrieve; break;
    case Step::Slice: c = &cost.slice; break;
    case Step::Prepare: c = &cost.prepare; break;
    case Step::Store: c = &cost.store; break;
  }
  return c->base + c->alpha * records * record_bytes / 1e6;
}

std::size_t ExecutionPlan::count(Step step) const {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(), [&](const Instance& i) { return i.step == step; }));
}

double ExecutionPlan::reservation(Step step) const {
  for (const auto& i : instances) {
    if (i.step == step) return i.reservation;
  }
  return 0;
}

std::vector<double> ExecutionPlan::reserved_memory() const {
  std::vector<double> out(cluster.nodes.size(), 0.0);
  for (const auto& i : instances) out[i.node] += i.reservation;
  return out;
}

std::string ExecutionPlan::describe() const {
  std::ostringstream out;
  out << "nc=" << csv::number(settings.nc) << " ns=" << csv::number(settings.ns) << " mode=" << to_string(settings.mode);
  for (Step s : {Step::Retrieve, Step::Slice, Step::Prepare, Step::Store}) {
    out << ' ' << to_string(s) << '=' << count(s) << 'x' << csv::number(reservation(s)) << "MB";
  }
  return out.str();
}

namespace {

const StepCost& step_cost(const CostModel& cost, Step step) {
  switch (step) {
    case Step::Retrieve: return cost.retrieve;
    case Step::Slice: return cost.slice;
    case Step::Prepare: return cost.prepare;
    case Step::Store: return cost.store;
  }
  return cost.store;
}

class Placer {
 public:
  explicit Placer(const ClusterSpec& c) {
    for (const auto& n : c.nodes) {
      memory_.push_back(n.memory);
      cpu_.push_back(n.cpu);
    }
  }

  bool place(Step step, double reservation, double cpu, std::vector<Instance>& out) {
    for (std::size_t k = 0; k < memory_.size(); ++k) {
      if (memory_[k] >= reservation && cpu_[k] >= cpu) {
        memory_[k] -= reservation;
        cpu_[k] -= cpu;
        out.push_back(Instance{step, k, reservation, cpu});
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail(Step step, double reservation, double cpu) const {
    const double mem_free = *std::max_element(memory_.begin(), memory_.end());
    const double cpu_free = *std::max_element(cpu_.begin(), cpu_.end());
    std::string binding;
    if (mem_free < reservation) {
      binding = "memory: needs " + csv::number(reservation) + " MB, at most " + csv::number(mem_free) + " MB free";
    } else if (cpu_free < cpu) {
      binding = "cpu: needs " + csv::number(cpu) + " millicores, at most " + csv::number(cpu_free) + " free";
    } else {
      binding = "memory and cpu: no node has both " + csv::number(reservation) + " MB and " + csv::number(cpu) +
                " millicores free";
    }
    throw InsufficientResources("cannot place " + std::string(to_string(step)) + " instance (" + binding + ")");
  }

 private:
  std::vector<double> memory_;
  std::vector<double> cpu_;
};

}  // namespace

ExecutionPlan deploy(const DeploySettings& settings, const ClusterSpec& cluster, const CostModel& cost,
                     const DeployOptions& options) {
  check(cluster);
  check(cost);
  if (!(settings.n >= 0) || !(settings.record_bytes > 0)) throw InvalidInput("workload size must be non-negative");
  if (options.slice_instances == 0 || options.store_instances == 0) {
    throw InvalidInput("slice and store need at least one instance");
  }

  ExecutionPlan plan;
  plan.settings = settings;
  plan.cluster = cluster;
  plan.cost = cost;
  auto& s = plan.settings;
  const double cap = std::max(std::floor(s.n), 1.0);
  s.nc = std::clamp(std::round(s.nc), 1.0, cap);
  s.ns = std::clamp(std::round(s.ns), 1.0, s.nc);

  auto reservation = [&](Step step) {
    const double records = (step == Step::Retrieve || step == Step::Slice) ? s.nc : s.ns;
    const double need = memory_need(cost, step, records, s.record_bytes);
    const double headroom = cost.noise * (need - step_cost(cost, step).base);
    if (options.policy == ReservationPolicy::Need) return need + headroom;
    if (step == Step::Slice || step == Step::Prepare) {
      const auto& configured = step == Step::Slice ? s.mrs : s.mrp;
      if (!configured) {
        throw InvalidInput(std::string(to_string(step)) + " has no configured memory reservation");
      }
      return *configured;
    }
    return need + headroom;
  };

  Placer placer(cluster);
  auto required = [&](Step step, std::size_t count) {
    const double r = reservation(step);
    const double cpu = step_cost(cost, step).cpu;
    for (std::size_t k = 0; k < count; ++k) {
      if (!placer.place(step, r, cpu, plan.instances)) placer.fail(step, r, cpu);
    }
  };
  required(Step::Retrieve, 1);
  required(Step::Slice, options.slice_instances);
  required(Step::Store, options.store_instances);

  std::size_t demand = options.prepare_instances;
  if (demand == 0) {
    double ratio = 0;
    if (s.ts && s.tp && *s.ts > 0 && *s.tp > 0) {
      ratio = *s.tp / *s.ts;
    } else {
      const double slices = std::ceil(s.nc / s.ns);
      const double prepare = slices * cost.prepare.overhead + s.nc / cost.prepare.throughput;
      const double slice = cost.slice.overhead + s.nc / cost.slice.throughput + slices * cost.publish_overhead;
      ratio = prepare / slice;
    }
    demand = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(options.slice_instances)));
    demand = std::clamp<std::size_t>(demand, 1, std::max<std::size_t>(options.max_prepare_instances, 1));
  }
  plan.prepare_demand = demand;
  required(Step::Prepare, 1);
  const double r = reservation(Step::Prepare);
  for (std::size_t k = 1; k < demand; ++k) {
    if (!placer.place(Step::Prepare, r, cost.prepare.cpu, plan.instances)) break;
  }
  return plan;
}

ExecutionPlan deploy(const kg::PipelineGraph& pipeline, const ClusterSpec& cluster, const CostModel& cost,
                     const DeployOptions& options) {
  return deploy(settings_from(pipeline), cluster, cost, options);
}

}  // namespace semcloud::sim
