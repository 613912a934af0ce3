#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "yoloslim/cost.hpp"
#include "yoloslim/graph.hpp"
#include "yoloslim/labels.hpp"
#include "yoloslim/prune.hpp"

namespace yoloslim {

// Every JSON document carries schema_version = 1.
inline constexpr int kSchemaVersion = 1;

/// Graph document: variant, input_channels, nodes (id, kind with its
/// parameters, inputs, repair flag). Detect's inputs double as
/// head_input_ids.
nlohmann::json graph_to_json(const ArchGraph& g);

/// Inverse of graph_to_json; unknown top-level keys are ignored so
/// audit-bearing documents load too. Throws GraphError on malformed
/// structure.
ArchGraph graph_from_json(const nlohmann::json& doc);

/// DOT digraph, one vertex per block labeled with kind and the shape
/// propagated at the given input; repair nodes render dashed.
std::string graph_to_dot(const ArchGraph& g, const TensorShape& input);

/// Audit trail of a pruning pass: rule, cascade, renumbering, repairs.
nlohmann::json prune_result_to_json(const PruneResult& result);

nlohmann::json profile_to_json(const DatasetProfile& profile,
                               Variant recommended, double theta);

nlohmann::json cost_report_to_json(const CostReport& report);

/// Aligned plain-text table: variant, params, GFLOPs, MB, and ratios
/// against the first (baseline) report.
std::string compare_table(const std::vector<CostReport>& reports);

nlohmann::json compare_to_json(const std::vector<CostReport>& reports);

}  // namespace yoloslim
