#pragma once

#include <string>
#include <vector>

#include "chaingraph/attractor.hpp"
#include "chaingraph/config.hpp"

namespace chaingraph {

struct RoundStats {
    std::vector<int> depth;
    std::size_t active_boxes = 0;
    std::size_t escaped = 0;
    std::size_t nodes = 0;
    double wall_ms = 0;
};

struct OracleValidation {
    bool ran = false;
    int pairs = 0;
    int agreements = 0;
    double agreement_rate = 0;
};

struct Prop4Check {
    bool ran = false;
    double time_t_1 = 0, time_t_2 = 0;
    GraphComparison comparison;
};

struct PipelineResult {
    RunConfig config;
    Grid grid;          // final grid
    BoxMap map;         // final box map (active set after refinement)
    ChainGraph graph;
    TrappingVerdict trapping;
    std::vector<int> trapping_depth;
    bool region_connected = false;
    AttractorApprox attractor;
    bool attractor_certified = false;
    bool prop2_containment = false;
    OracleValidation validation;
    Prop4Check prop4;
    std::vector<RoundStats> rounds;
    double total_ms = 0;
    // pipeline halted after the attractor-candidate stage (trapping failed):
    // oracle validation and edge classification skipped
    bool halted_after_attractor = false;
};

/// Full pipeline: verify_trapping -> build_box_map -> condensation ->
/// nodes/edges -> adjacency reduction -> top/bottom -> connectedness ->
/// attractor -> (optional) oracle validation and edge classification, with a
/// prune+subdivide refinement loop from a coarse bootstrap grid up to
/// initial_depth + refinement_rounds (capped by max_depth).
PipelineResult run_pipeline(const RunConfig& config);

/// Boxes of `grid` that intersect the region (all of them for box regions).
std::vector<box_index> region_boxes(const Grid& grid, const RegionSpec& region);

Grid make_grid(const RegionSpec& region, int per_dim_depth);

}  // namespace chaingraph
