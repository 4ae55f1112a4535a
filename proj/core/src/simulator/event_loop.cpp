#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

#include "semcloud/errors.hpp"
#include "semcloud/simulator/run.hpp"

namespace semcloud::sim {

namespace {

struct Message {
  std::size_t first = 0;
  std::size_t count = 0;
  std::size_t machine = 0;
};

enum class EventKind { Finish, Arrive, EndOfStream, Ready };

struct Event {
  double t = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Ready;
  std::size_t target = 0;  // instance for Finish, channel otherwise
  Message message;

  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct InstanceState {
  Step step = Step::Prepare;
  std::size_t node = 0;
  double reservation = 0;
  double cpu = 0;
  double base = 0;
  bool busy = false;
  Message message;
  int attempts = 0;
  double attempt_start = 0;
  double working = 0;  // MB above base during the attempt
  bool failed = false;
};

struct Channel {
  std::deque<Message> queue;
  bool end_arrived = false;
  bool end_forwarded = false;
  bool ready_pending = false;
};

const StepCost& step_cost(const CostModel& cost, Step step) {
  switch (step) {
    case Step::Retrieve: return cost.retrieve;
    case Step::Slice: return cost.slice;
    case Step::Prepare: return cost.prepare;
    case Step::Store: return cost.store;
  }
  return cost.store;
}

class Simulation {
 public:
  Simulation(const ExecutionPlan& plan, const SimWorkload& workload, const RunOptions& options)
      : plan_(plan), cost_(plan.cost), w_(workload), options_(options), rng_(plan.cost.seed) {
    if (!(workload.n >= 0) || !(workload.record_bytes > 0) || workload.machines == 0) {
      throw InvalidInput("simulated workload needs n >= 0, record_bytes > 0 and machines >= 1");
    }
    total_ = static_cast<std::size_t>(std::floor(workload.n));
    nc_ = std::min<std::size_t>(static_cast<std::size_t>(plan.settings.nc), std::max<std::size_t>(total_, 1));
    ns_ = std::min<std::size_t>(static_cast<std::size_t>(plan.settings.ns), nc_);
    mb_per_record_ = workload.record_bytes / 1e6;

    const std::size_t nodes = plan.cluster.nodes.size();
    node_memory_.assign(nodes, 0.0);
    node_cpu_.assign(nodes, 0.0);
    for (const auto& i : plan.instances) {
      InstanceState s;
      s.step = i.step;
      s.node = i.node;
      s.reservation = i.reservation;
      s.cpu = i.cpu;
      s.base = step_cost(cost_, i.step).base;
      node_memory_[i.node] += s.base;
      instances_.push_back(s);
    }
    trace_.peak_memory = node_memory_;
    for (const auto& n : plan.cluster.nodes) trace_.nodes.push_back(n.name);
    if (options_.record_series) {
      trace_.memory.resize(nodes);
      trace_.cpu.resize(nodes);
      for (std::size_t k = 0; k < nodes; ++k) {
        trace_.memory[k].push_back({0, node_memory_[k]});
        trace_.cpu[k].push_back({0, 0});
      }
    }
    for (Step s : {Step::Retrieve, Step::Slice, Step::Prepare, Step::Store}) {
      trace_.steps[index(s)].reservation = plan.reservation(s);
    }
  }

  RunResult execute() {
    push(Event{options_.start_delay[index(Step::Retrieve)], 0, EventKind::Ready, kRetrieveChannel, {}});
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      now_ = e.t;
      switch (e.kind) {
        case EventKind::Finish: finish(e.target); break;
        case EventKind::Arrive:
          channels_[e.target].queue.push_back(e.message);
          dispatch(e.target);
          break;
        case EventKind::EndOfStream:
          channels_[e.target].end_arrived = true;
          drain_check(e.target);
          break;
        case EventKind::Ready:
          if (e.target == kRetrieveChannel) {
            retrieve_next();
          } else {
            channels_[e.target].ready_pending = false;
            dispatch(e.target);
          }
          break;
      }
    }
    return result();
  }

 private:
  static constexpr std::size_t kRetrieveChannel = 3;

  static std::size_t index(Step s) { return static_cast<std::size_t>(s); }
  static Step consumer_of(std::size_t channel) { return static_cast<Step>(channel + 1); }

  void push(Event e) {
    e.seq = next_seq_++;
    events_.push(e);
  }

  double draw() {
    if (cost_.noise == 0) return 1.0;
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return 1.0 + cost_.noise * (2 * u - 1);
  }

  void set_node(std::size_t node, double memory_delta, double cpu_delta) {
    if (options_.record_series) {
      trace_.memory[node].push_back({now_, node_memory_[node]});
      trace_.cpu[node].push_back({now_, node_cpu_[node]});
    }
    node_memory_[node] += memory_delta;
    node_cpu_[node] += cpu_delta;
    if (std::abs(node_cpu_[node]) < 1e-9) node_cpu_[node] = 0;
    trace_.peak_memory[node] = std::max(trace_.peak_memory[node], node_memory_[node]);
    if (options_.record_series) {
      trace_.memory[node].push_back({now_, node_memory_[node]});
      trace_.cpu[node].push_back({now_, node_cpu_[node]});
    }
  }

  std::size_t machine_start(std::size_t m) const {
    const std::size_t q = total_ / w_.machines, r = total_ % w_.machines;
    return m * q + std::min(m, r);
  }

  std::size_t slices_in(const Message& chunk) const {
    std::size_t count = 0;
    for_each_slice(chunk, [&](const Message&) { ++count; });
    return count;
  }

  template <class F>
  void for_each_slice(const Message& chunk, F&& f) const {
    std::size_t pos = chunk.first;
    const std::size_t end = chunk.first + chunk.count;
    while (pos < end) {
      const std::size_t m = w_.machine_of(pos);
      const std::size_t run_end = std::min(end, machine_start(m + 1));
      for (std::size_t s = pos; s < run_end; s += ns_) f(Message{s, std::min(ns_, run_end - s), m});
      pos = run_end;
    }
  }

  double duration(const InstanceState& inst) const {
    const StepCost& c = step_cost(cost_, inst.step);
    const double records = static_cast<double>(inst.message.count);
    double d = c.overhead + records / c.throughput;
    if (inst.step == Step::Slice) d += static_cast<double>(slices_in(inst.message)) * cost_.publish_overhead;
    if (inst.step == Step::Store) {
      const StorageTier& tier = plan_.cluster.tier(plan_.settings.mode);
      d += tier.latency + cost_.prepare.expansion * records * mb_per_record_ / tier.throughput;
    }
    return d;
  }

  void start(std::size_t i, const Message& m) {
    InstanceState& inst = instances_[i];
    StepTotals& totals = trace_.steps[index(inst.step)];
    if (totals.messages == 0 && inst.attempts == 0 && !started_[index(inst.step)]) {
      totals.start = now_;
      started_[index(inst.step)] = true;
    }
    inst.busy = true;
    inst.message = m;
    inst.attempt_start = now_;
    const double d = duration(inst) * draw();
    const StepCost& c = step_cost(cost_, inst.step);
    const double used = inst.base + c.alpha * static_cast<double>(m.count) * mb_per_record_ * draw();
    inst.failed = used > inst.reservation * (1 + 1e-12);
    const double held = std::min(used, inst.reservation);
    inst.working = std::max(held - inst.base, 0.0);
    totals.peak_instance_memory = std::max(totals.peak_instance_memory, held);
    set_node(inst.node, inst.working, inst.cpu);
    const double busy = inst.failed ? d * (1 + cost_.restart_penalty) : d;
    totals.busy += busy;
    trace_.cpu_integral += busy * inst.cpu;
    push(Event{now_ + busy, 0, EventKind::Finish, i, {}});
  }

  void retrieve_next() {
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      if (instances_[i].step != Step::Retrieve || instances_[i].busy) continue;
      if (next_record_ >= total_) {
        if (!retrieve_done_ && !any_busy(Step::Retrieve)) {
          retrieve_done_ = true;
          push(Event{now_ + plan_.cluster.queue_latency, 0, EventKind::EndOfStream, 0, {}});
        }
        return;
      }
      const std::size_t count = std::min(nc_, total_ - next_record_);
      start(i, Message{next_record_, count, 0});
      next_record_ += count;
    }
  }

  bool any_busy(Step step) const {
    return std::any_of(instances_.begin(), instances_.end(),
                       [&](const InstanceState& s) { return s.step == step && s.busy; });
  }

  void dispatch(std::size_t channel) {
    Channel& ch = channels_[channel];
    const Step step = consumer_of(channel);
    const double delay = options_.start_delay[index(step)];
    if (now_ < delay) {
      if (!ch.queue.empty() && !ch.ready_pending) {
        ch.ready_pending = true;
        push(Event{delay, 0, EventKind::Ready, channel, {}});
      }
      return;
    }
    for (std::size_t i = 0; i < instances_.size() && !ch.queue.empty(); ++i) {
      if (instances_[i].step != step || instances_[i].busy) continue;
      const Message m = ch.queue.front();
      ch.queue.pop_front();
      ++trace_.channels[channel].delivered;
      start(i, m);
    }
  }

  void publish(std::size_t channel, const Message& m) {
    ++trace_.channels[channel].published;
    push(Event{now_ + plan_.cluster.queue_latency, 0, EventKind::Arrive, channel, m});
  }

  void add_storage(Step step, double records) {
    StepTotals& totals = trace_.steps[index(step)];
    totals.storage += step_cost(cost_, step).expansion * records * mb_per_record_ * draw();
    if (step == Step::Store && plan_.settings.mode == StorageMode::Fast) {
      const double capacity = plan_.cluster.fast.capacity;
      if (capacity > 0 && totals.storage > capacity) {
        throw CapacityExceeded("fast storage full after " + std::to_string(totals.storage) + " MB");
      }
    }
  }

  void finish(std::size_t i) {
    InstanceState& inst = instances_[i];
    StepTotals& totals = trace_.steps[index(inst.step)];
    set_node(inst.node, -inst.working, -inst.cpu);
    inst.working = 0;
    inst.busy = false;
    if (inst.failed) {
      ++totals.restarts;
      if (++inst.attempts > cost_.max_restarts) {
        throw SimulatedOutOfMemory(std::string(to_string(inst.step)) + " instance exceeded its " +
                                   std::to_string(inst.reservation) + " MB reservation " +
                                   std::to_string(inst.attempts) + " times");
      }
      start(i, inst.message);
      return;
    }
    inst.attempts = 0;
    ++totals.messages;
    totals.end = now_;
    const Message m = inst.message;
    add_storage(inst.step, static_cast<double>(m.count));
    switch (inst.step) {
      case Step::Retrieve:
        publish(0, m);
        retrieve_next();
        return;
      case Step::Slice:
        ++trace_.channels[0].acknowledged;
        for_each_slice(m, [&](const Message& s) { publish(1, s); });
        dispatch(0);
        drain_check(0);
        return;
      case Step::Prepare:
        ++trace_.channels[1].acknowledged;
        publish(2, m);
        dispatch(1);
        drain_check(1);
        return;
      case Step::Store:
        ++trace_.channels[2].acknowledged;
        stored_.push_back(RecordRange{m.machine, m.first, m.count});
        dispatch(2);
        drain_check(2);
        return;
    }
  }

  void drain_check(std::size_t channel) {
    Channel& ch = channels_[channel];
    if (!ch.end_arrived || ch.end_forwarded || !ch.queue.empty() || any_busy(consumer_of(channel))) return;
    ch.end_forwarded = true;
    if (channel + 1 < channels_.size()) {
      push(Event{now_ + plan_.cluster.queue_latency, 0, EventKind::EndOfStream, channel + 1, {}});
    } else {
      trace_.consumed_time = now_;
    }
  }

  RunResult result() {
    if (options_.record_series) {
      for (std::size_t k = 0; k < node_memory_.size(); ++k) {
        trace_.memory[k].push_back({trace_.consumed_time, node_memory_[k]});
        trace_.cpu[k].push_back({trace_.consumed_time, node_cpu_[k]});
      }
    }
    RunResult r;
    std::sort(stored_.begin(), stored_.end());
    r.stored = std::move(stored_);

    const auto& s = plan_.settings;
    PilotRunRecord& rec = r.record;
    rec.p = s.pipeline;
    rec.n = static_cast<double>(total_);
    rec.v = w_.volume();
    rec.nc = static_cast<double>(nc_);
    rec.ns = static_cast<double>(ns_);
    rec.mode = s.mode;
    const auto& sl = trace_.step(Step::Slice);
    const auto& pr = trace_.step(Step::Prepare);
    rec.ts = sl.duration();
    rec.tp = pr.duration();
    rec.ms = sl.peak_instance_memory;
    rec.mp = pr.peak_instance_memory;
    rec.ssl = sl.storage;
    rec.spr = pr.storage;
    rec.sst = trace_.step(Step::Store).storage;
    rec.mrs = sl.reservation;
    rec.mrp = pr.reservation;
    rec.total_time = trace_.consumed_time;
    rec.cpu_integral = trace_.cpu_integral;
    rec.kind = RunKind::Configuration;
    r.trace = std::move(trace_);
    return r;
  }

  const ExecutionPlan& plan_;
  const CostModel& cost_;
  const SimWorkload& w_;
  const RunOptions& options_;
  std::mt19937_64 rng_;

  std::size_t total_ = 0;
  std::size_t nc_ = 1;
  std::size_t ns_ = 1;
  double mb_per_record_ = 0;
  double now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<InstanceState> instances_;
  std::array<Channel, 3> channels_;
  std::array<bool, kStepCount> started_{};
  std::vector<double> node_memory_;
  std::vector<double> node_cpu_;
  std::size_t next_record_ = 0;
  bool retrieve_done_ = false;
  std::vector<RecordRange> stored_;
  RunTrace trace_;
};

}  // namespace

RunResult run(const ExecutionPlan& plan, const SimWorkload& workload, const RunOptions& options) {
  if (plan.instances.empty()) throw InvalidInput("execution plan has no instances");
  return Simulation(plan, workload, options).execute();
}

}  // namespace semcloud::sim
