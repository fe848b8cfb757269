#include "chaingraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "chaingraph/oracle.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

// distance from a point to a cell, for ball-region membership
bool cell_intersects_ball(const Grid& g, box_index idx, const std::vector<double>& center, double radius) {
    Box b = g.cell_bounds(idx);
    double s = 0;
    for (int d = 0; d < g.dim(); ++d) {
        double gap = 0;
        if (center[d] < b.lo[d])
            gap = b.lo[d] - center[d];
        else if (center[d] > b.hi[d])
            gap = center[d] - b.hi[d];
        s += gap * gap;
    }
    return s <= radius * radius;
}

int bootstrap_depth(int dim, int target) {
    // keep the first full build at ~2^17 cells or fewer
    int b = std::max(1, 17 / dim);
    return std::min(b, target);
}

}  // namespace

Grid make_grid(const RegionSpec& region, int per_dim_depth) {
    std::vector<int> depth(region.box.dim(), per_dim_depth);
    return Grid(region.box, depth, region.periodic);
}

std::vector<box_index> region_boxes(const Grid& grid, const RegionSpec& region) {
    std::vector<box_index> out;
    if (region.kind == RegionSpec::Kind::box) {
        out.resize(grid.box_count());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
        return out;
    }
    for (box_index b = 0; b < grid.box_count(); ++b)
        if (cell_intersects_ball(grid, b, region.center, region.radius)) out.push_back(b);
    return out;
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    PipelineResult res;
    res.config = config;
    double t0 = now_ms();

    SystemEvaluator sys(config.system);
    const int dim = sys.dim();
    const int final_depth = std::min(config.initial_depth + config.refinement_rounds, config.max_depth);
    int depth = bootstrap_depth(dim, config.initial_depth);

    Grid grid = make_grid(config.region, depth);
    std::vector<box_index> active = region_boxes(grid, config.region);
    res.region_connected = connectedness_of_attractor(active, grid);

    BoxMap map;
    bool first = true;
    while (true) {
        double r0 = now_ms();
        map = build_box_map(sys, grid, config.sampling, active);
        if (first) {
            res.trapping = verify_trapping(map, map.boxes);
            res.trapping_depth = grid.depth();
            first = false;
        }
        RoundStats rs;
        rs.depth = grid.depth();
        rs.active_boxes = map.size();
        rs.escaped = map.escaped.size();

        if (depth >= final_depth) {
            rs.wall_ms = now_ms() - r0;
            res.rounds.push_back(rs);
            break;
        }
        BoxMap pruned = prune_to_chain_recurrent(map);
        std::vector<int> dims(dim);
        for (int d = 0; d < dim; ++d) dims[d] = d;
        Grid finer = subdivide(grid, dims);
        std::vector<box_index> next;
        next.reserve(pruned.boxes.size() << dim);
        for (box_index b : pruned.boxes) {
            auto kids = child_boxes(grid, finer, b);
            if (config.region.kind == RegionSpec::Kind::ball) {
                for (box_index k : kids)
                    if (cell_intersects_ball(finer, k, config.region.center, config.region.radius))
                        next.push_back(k);
            } else {
                next.insert(next.end(), kids.begin(), kids.end());
            }
        }
        std::sort(next.begin(), next.end());
        rs.wall_ms = now_ms() - r0;
        res.rounds.push_back(rs);
        if (next.empty()) break;  // nothing recurrent survived; keep the last map
        grid = finer;
        active = std::move(next);
        ++depth;
    }

    res.grid = grid;
    res.graph = assemble_chain_graph(map);
    if (!res.rounds.empty()) res.rounds.back().nodes = res.graph.nodes.size();

    // attractor approximation on the final active set (certified only when
    // the trapping verdict passed)
    std::vector<box_index> attr_region;
    for (box_index b : map.boxes)
        if (!map.is_escaped(b)) attr_region.push_back(b);
    if (!attr_region.empty()) {
        res.attractor = global_attractor_outer(map, attr_region);
        res.attractor_certified = res.trapping.forward_invariant;
    }

    res.prop2_containment = true;
    for (const Node& n : res.graph.nodes)
        for (box_index b : n.boxes)
            if (!std::binary_search(res.attractor.boxes.begin(), res.attractor.boxes.end(), b))
                res.prop2_containment = false;

    if (!res.trapping.forward_invariant) {
        // report emitted with trapping failed; oracle validation and edge
        // classification are skipped
        res.halted_after_attractor = true;
    } else {
        if (config.oracle.enabled && dim <= 2) {
            SplitMix rng(mix64(config.seed ^ 0xabcdef12345ull));
            const Box& dom = config.region.box;
            int agreements = 0, pairs = 0;
            for (int t = 0; t < config.oracle.pairs; ++t) {
                std::vector<double> p(dim), q(dim);
                for (int d = 0; d < dim; ++d) {
                    p[d] = rng.uniform(dom.lo[d], dom.hi[d]);
                    q[d] = rng.uniform(dom.lo[d], dom.hi[d]);
                }
                const Node* np = res.graph.node_containing(p, grid);
                const Node* nq = res.graph.node_containing(q, grid);
                bool same = np && nq && np->id == nq->id;
                auto pq = downstream_oracle(sys, dom, p, q, config.oracle.eps_schedule,
                                            config.oracle.spacing_ratio);
                auto qp = downstream_oracle(sys, dom, q, p, config.oracle.eps_schedule,
                                            config.oracle.spacing_ratio);
                bool mutual = pq.verdict == DownstreamVerdict::downstream &&
                              qp.verdict == DownstreamVerdict::downstream;
                ++pairs;
                if (same == mutual) ++agreements;
            }
            res.validation.ran = true;
            res.validation.pairs = pairs;
            res.validation.agreements = agreements;
            res.validation.agreement_rate = pairs ? double(agreements) / pairs : 0.0;
        }
        if (config.classify_edges && !res.attractor.boxes.empty()) {
            for (Edge& e : res.graph.edges) {
                auto r = classify_edge(map, res.attractor.boxes, res.graph.nodes[e.from],
                                       res.graph.nodes[e.to], res.graph.nodes, sys,
                                       config.classify_budget, mix64(config.seed ^ 0x9177));
                e.strength = r.label;
            }
        }
    }

    if (config.compare_time_t && config.system.is_flow() && config.system.mode == StepMode::time_t_map) {
        RunConfig other = config;
        other.system.time_step = *config.compare_time_t;
        other.compare_time_t.reset();
        other.oracle.enabled = false;
        other.classify_edges = false;
        PipelineResult r2 = run_pipeline(other);
        res.prop4.ran = true;
        res.prop4.time_t_1 = config.system.time_step;
        res.prop4.time_t_2 = *config.compare_time_t;
        res.prop4.comparison = compare_chain_graphs(res.graph, r2.graph, grid);
    }

    res.total_ms = now_ms() - t0;
    return res;
}

}  // namespace chaingraph
