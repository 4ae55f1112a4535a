#include "semcloud/pipeline_kg/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semcloud/errors.hpp"

namespace semcloud::kg {

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    out += v.rule + ": " + v.message;
    if (!v.nodes.empty()) {
      out += " [";
      for (std::size_t i = 0; i < v.nodes.size(); ++i) out += (i ? ", " : "") + v.nodes[i];
      out += "]";
    }
    out += "\n";
  }
  return out;
}

void throw_if_invalid(const ValidationReport& report) {
  if (report.ok()) return;
  if (report.has("cycle")) throw CycleError(report.to_string());
  throw StructureError(report.to_string());
}

namespace {

bool allowed_transition(TaskKind from, TaskKind to, FrequencyClass freq) {
  switch (from) {
    case TaskKind::Retrieve:
      return freq == FrequencyClass::Frequent ? to == TaskKind::Slice : to == TaskKind::Prepare;
    case TaskKind::Slice: return to == TaskKind::Prepare;
    case TaskKind::Prepare: return to == TaskKind::Prepare || to == TaskKind::Store;
    case TaskKind::Store: return false;
  }
  return false;
}

std::string_view layer_kind(std::string_view type) {
  if (type == "RetrieveLayer") return "Retrieve";
  if (type == "SliceLayer") return "Slice";
  if (type == "PrepareLayer") return "Prepare";
  if (type == "StoreLayer") return "Store";
  return {};
}

class Validator {
 public:
  explicit Validator(const PipelineGraph& g) : g_(g) {}

  ValidationReport run() {
    ids();
    references();
    structure();
    fields();
    data();
    return std::move(report_);
  }

 private:
  void add(std::string rule, std::vector<std::string> nodes, std::string message) {
    report_.violations.push_back(Violation{std::move(rule), std::move(nodes), std::move(message)});
  }

  void ids() {
    std::map<std::string, int> seen;
    ++seen[g_.id];
    for (const auto& x : g_.layers) ++seen[x.id];
    for (const auto& x : g_.tasks) ++seen[x.id];
    for (const auto& x : g_.io_handlers) ++seen[x.id];
    for (const auto& x : g_.data_entities) ++seen[x.id];
    for (const auto& x : g_.requirements) ++seen[x.id];
    for (const auto& [id, count] : seen) {
      if (id.empty()) add("id", {}, "empty node id");
      else if (count > 1) add("id", {id}, "id used by more than one node");
    }
  }

  bool has_requirement(const std::string& id) const {
    return std::any_of(g_.requirements.begin(), g_.requirements.end(), [&](const auto& r) { return r.id == id; });
  }

  void references() {
    auto need_task = [&](const std::string& from, const std::string& to) {
      if (g_.task(to) == nullptr) add("reference", {from, to}, "unknown task " + to);
    };
    auto need_data = [&](const std::string& from, const std::string& to) {
      if (g_.data_entity(to) == nullptr) add("reference", {from, to}, "unknown data entity " + to);
    };
    if (g_.start_task.empty()) add("start-task", {g_.id}, "pipeline has no start task");
    else need_task(g_.id, g_.start_task);
    for (const auto& d : g_.input_data) need_data(g_.id, d);
    if (g_.input_data.empty()) add("input-data", {g_.id}, "pipeline has no input data");

    std::map<std::string, std::string> layer_of;
    for (const auto& l : g_.layers) {
      const auto kind = layer_kind(l.type);
      for (const auto& t : l.tasks) {
        need_task(l.id, t);
        if (auto [it, fresh] = layer_of.emplace(t, l.id); !fresh) {
          add("layer", {t, it->second, l.id}, "task belongs to two layers");
        }
        const TaskNode* node = g_.task(t);
        if (node && !kind.empty() && to_string(node->kind) != kind) {
          add("layer", {l.id, t}, std::string(to_string(node->kind)) + " task in " + l.type);
        }
      }
    }
    for (const auto& t : g_.tasks) {
      for (const auto& n : t.next) need_task(t.id, n);
      if (!t.io.empty() && g_.io_handler(t.io) == nullptr) add("reference", {t.id, t.io}, "unknown IO handler");
      if (t.requirement && !has_requirement(*t.requirement)) {
        add("reference", {t.id, *t.requirement}, "unknown requirement set");
      }
    }
    for (const auto& h : g_.io_handlers) {
      for (const auto& d : h.inputs) need_data(h.id, d);
      for (const auto& d : h.outputs) need_data(h.id, d);
    }
  }

  void structure() {
    std::map<std::string, int> indegree;
    for (const auto& t : g_.tasks) indegree[t.id];
    for (const auto& t : g_.tasks) {
      for (const auto& n : t.next) {
        if (g_.task(n)) ++indegree[n];
      }
    }

    std::vector<std::string> roots;
    std::vector<std::string> sinks;
    for (const auto& t : g_.tasks) {
      if (indegree[t.id] == 0) roots.push_back(t.id);
      if (t.next.empty()) sinks.push_back(t.id);
    }
    if (roots.size() != 1) {
      add("single-root", roots, "expected exactly one root task, found " + std::to_string(roots.size()));
    } else {
      if (g_.task(roots[0])->kind != TaskKind::Retrieve) add("single-root", roots, "root task is not a Retrieve");
      if (!g_.start_task.empty() && g_.start_task != roots[0]) {
        add("start-task", {g_.start_task, roots[0]}, "start task is not the root task");
      }
    }
    if (sinks.size() != 1) {
      add("single-sink", sinks, "expected exactly one sink task, found " + std::to_string(sinks.size()));
    } else if (g_.task(sinks[0])->kind != TaskKind::Store) {
      add("single-sink", sinks, "sink task is not a Store");
    }

    // Kahn; whatever remains sits on or behind a cycle.
    std::vector<std::string> ready;
    for (const auto& [id, d] : indegree) {
      if (d == 0) ready.push_back(id);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
      const std::string id = ready.back();
      ready.pop_back();
      ++visited;
      for (const auto& n : g_.task(id)->next) {
        if (g_.task(n) && --indegree[n] == 0) ready.push_back(n);
      }
    }
    if (visited < g_.tasks.size()) {
      std::vector<std::string> stuck;
      for (const auto& [id, d] : indegree) {
        if (d > 0) stuck.push_back(id);
      }
      add("cycle", stuck, "hasNextTask contains a cycle");
    }

    for (const auto& t : g_.tasks) {
      if (t.kind == TaskKind::Slice && g_.frequency == FrequencyClass::Infrequent) {
        add("kind-order", {t.id}, "Slice task in an infrequent pipeline");
      }
      for (const auto& n : t.next) {
        const TaskNode* next = g_.task(n);
        if (next && !allowed_transition(t.kind, next->kind, g_.frequency)) {
          add("kind-order", {t.id, n},
              std::string(to_string(t.kind)) + " -> " + std::string(to_string(next->kind)) + " not allowed in a " +
                  std::string(to_string(g_.frequency)) + " pipeline");
        }
      }
    }
    if (g_.frequency == FrequencyClass::Frequent && g_.tasks_of(TaskKind::Slice).empty()) {
      add("kind-order", {g_.id}, "frequent pipeline without a Slice task");
    }
  }

  void fields() {
    for (const auto& t : g_.tasks) {
      const bool slice = t.kind == TaskKind::Slice;
      const bool prepare = t.kind == TaskKind::Prepare;
      if (!slice && (t.chunk_size || t.slice_size)) add("kind-fields", {t.id}, "chunk/slice size on a non-Slice task");
      if (!slice && !prepare && (t.memory_reservation || t.required_time)) {
        add("kind-fields", {t.id}, "memory reservation/required time on a task that is neither Slice nor Prepare");
      }
      if (t.kind != TaskKind::Store && t.storage_mode) add("kind-fields", {t.id}, "storage mode on a non-Store task");

      if (t.slice_size && !(*t.slice_size >= 1)) add("slice-size", {t.id}, "ns must be >= 1");
      if (t.chunk_size && !(*t.chunk_size >= 1)) add("slice-size", {t.id}, "nc must be >= 1");
      if (t.chunk_size && t.slice_size && !(*t.chunk_size >= *t.slice_size)) {
        add("slice-size", {t.id}, "nc must be >= ns");
      }
      if (t.memory_reservation && !(*t.memory_reservation > 0)) {
        add("reservation", {t.id}, "memory reservation must be positive");
      }
      if (t.required_time && !(*t.required_time >= 0)) add("required-time", {t.id}, "required time is negative");
    }
    for (const auto& r : g_.requirements) {
      if (!(r.computing >= 0 && r.memory >= 0 && r.storage >= 0 && r.network >= 0)) {
        add("requirement", {r.id}, "requirements must be nonnegative");
      }
    }
  }

  void data() {
    std::map<std::string, std::vector<std::string>> producers;  // data -> tasks
    std::map<std::string, std::vector<std::string>> consumers;
    for (const auto& t : g_.tasks) {
      const IOHandler* h = t.io.empty() ? nullptr : g_.io_handler(t.io);
      if (!h) continue;
      for (const auto& d : h->outputs) producers[d].push_back(t.id);
      for (const auto& d : h->inputs) consumers[d].push_back(t.id);
    }
    std::map<std::string, int> handler_outputs;
    for (const auto& h : g_.io_handlers) {
      for (const auto& d : h.outputs) ++handler_outputs[d];
    }

    for (const auto& d : g_.data_entities) {
      if (d.volume && !(*d.volume >= 0)) add("volume", {d.id}, "volume is negative");
      if (d.no_records && !(*d.no_records >= 0)) add("volume", {d.id}, "record count is negative");
      if (d.volume && d.no_records && ((*d.no_records == 0) != (*d.volume == 0))) {
        add("volume", {d.id}, "record count and volume must be zero together");
      }
      if (handler_outputs[d.id] != 1) {
        add("producer", {d.id},
            "data entity is the output of " + std::to_string(handler_outputs[d.id]) + " IO handlers (expected 1)");
        continue;
      }
      const auto& prod = producers[d.id];
      if (prod.size() != 1) continue;  // handler not attached to exactly one task
      const TaskNode* producer = g_.task(prod[0]);
      for (const auto& c : consumers[d.id]) {
        if (std::find(producer->next.begin(), producer->next.end(), c) == producer->next.end()) {
          add("consumer", {d.id, prod[0], c}, "consumer is not a successor of the producing task");
        }
      }
    }
  }

  const PipelineGraph& g_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const PipelineGraph& graph) { return Validator(graph).run(); }

}  // namespace semcloud::kg
