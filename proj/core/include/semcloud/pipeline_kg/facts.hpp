#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semcloud/common/pilot_record.hpp"
#include "semcloud/datalog/fact_set.hpp"
#include "semcloud/pipeline_kg/graph.hpp"

namespace semcloud::kg {

/// Cloud(c) and its has* attribute atoms.
datalog::FactSet cloud_facts(const CloudAttributes& cloud);

/// EDB for the rule corpus: every triple of the graph as an atom (classes as
/// unary atoms), the cloud attributes, and, with a pilot record, the
/// hasEst*(p, x) estimates plus values for task/data fields the graph leaves
/// unset. Graph values always win over pilot values. Throws InvalidGraph.
datalog::FactSet to_facts(const PipelineGraph& graph, const CloudAttributes& cloud,
                          const std::optional<PilotRunRecord>& pilot = std::nullopt);

/// Rebuilds pipeline `id` from facts produced by to_facts. Collections come
/// back in id order; compare against canonical(graph).
PipelineGraph from_facts(const datalog::FactSet& facts, std::string_view id);

/// Ids of all ETLPipeline atoms.
std::vector<std::string> pipelines_in(const datalog::FactSet& facts);

/// Graph with every collection sorted by id and every id list sorted.
PipelineGraph canonical(PipelineGraph graph);

}  // namespace semcloud::kg
