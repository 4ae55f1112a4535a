#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semcloud/pipeline_kg/graph.hpp"

namespace semcloud::kg {

inline constexpr std::string_view kPipelineFormat = "semcloud-pipeline/1";

/// Reads a pipeline document (JSON, `"format": "semcloud-pipeline/1"`), in
/// either key-value form or `"triples": [[s, p, o], ...]` form, and validates
/// the result. Throws SchemaError, StructureError, CycleError.
PipelineGraph parse_pipeline(std::string_view document);

/// Triples of a document without building or validating a graph.
std::vector<Triple> parse_document_triples(std::string_view document);

/// Key-value form, stable key order, two-space indent.
std::string serialize_pipeline(const PipelineGraph& graph);
/// Triple-list form.
std::string serialize_pipeline_triples(const PipelineGraph& graph);

PipelineGraph load_pipeline(const std::string& path);
void save_pipeline(const std::string& path, const PipelineGraph& graph);

}  // namespace semcloud::kg
