#pragma once

#include <string>

#include "chaingraph/pipeline.hpp"

namespace chaingraph {

/// Schema-versioned report with stable key order; everything except the
/// "timings" section is deterministic for a fixed config and seed.
ordered_json build_report(const PipelineResult& result);

std::string export_report(const PipelineResult& result);

/// Round-trip helper: re-extracts the config from a report document.
RunConfig config_from_report(const ordered_json& report);

/// DOT digraph: node shapes encode the annotation (top=circle, bottom=square,
/// saddle=diamond, isolated=doublecircle); strong edges solid, weak-candidate
/// edges dashed. Reduced mode draws the covering relation only.
std::string export_dot(const ChainGraph& graph, bool reduced);

/// One box per line: lo hi per dimension, space separated.
std::string export_boxlist(const std::vector<box_index>& boxes, const Grid& grid);

}  // namespace chaingraph
