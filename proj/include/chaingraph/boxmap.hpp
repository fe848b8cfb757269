#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chaingraph/geometry.hpp"
#include "chaingraph/systems.hpp"

namespace chaingraph {

/// Image sampling stencil: 2^d corners + center + per-face midpoints, plus
/// extra deterministic random points per box. The image hull is bloated per
/// dimension by bloat_factor * spread/2 + one target-cell radius.
struct SamplingConfig {
    bool corners = true;
    bool center = true;
    bool face_midpoints = true;
    int extra_random = 0;
    double bloat_factor = 1.0;
    std::uint64_t seed = 1;
    // A hull that would raster to more cells than this is split into
    // single-linkage sample clusters bloated separately; this only triggers
    // for discontinuous section maps, where a box straddling the
    // discontinuity has images in far-apart patches.
    std::size_t max_hull_cells = 32768;
};

/// Combinatorial multivalued map: for each active box, the sorted grid cells
/// intersected by the bloated image hull of its sample stencil. A box whose
/// raw sample images leave the grid (or whose evaluation escapes the safety
/// ball / never returns to the section) is recorded in `escaped`; bloat that
/// merely spills past non-periodic bounds is clipped instead.
struct BoxMap {
    Grid grid;
    std::vector<box_index> boxes;             // sorted active boxes
    std::vector<std::uint64_t> succ_offsets;  // boxes.size()+1 entries
    std::vector<box_index> successors;        // global indices, sorted per box
    std::vector<box_index> escaped;           // sorted subset of boxes

    std::size_t size() const { return boxes.size(); }
    std::optional<std::size_t> local_id(box_index b) const;
    std::span<const box_index> succs(std::size_t local) const;
    bool is_escaped(box_index b) const;
};

BoxMap build_box_map(const SystemEvaluator& sys, const Grid& grid, const SamplingConfig& cfg);
BoxMap build_box_map(const SystemEvaluator& sys, const Grid& grid, const SamplingConfig& cfg,
                     std::vector<box_index> active);

/// Strongly connected components of the box map restricted to non-escaped
/// boxes, with the induced condensation DAG. SCCs are emitted sinks-first, so
/// increasing emission index is reverse topological order.
struct Condensation {
    std::vector<std::int32_t> scc_of;  // per local box; -1 for escaped boxes
    std::int32_t scc_count = 0;
    std::vector<std::vector<std::int32_t>> members;  // local box ids per scc
    std::vector<std::vector<std::int32_t>> dag;      // condensed edges, sorted per scc
    std::vector<bool> recurrent;  // size > 1, or singleton with a self-successor
};

Condensation scc_condensation(const BoxMap& m);

enum class NodeAnnotation { top, bottom, saddle, isolated };
enum class EdgeStrength { strong, weak_candidate, unclassified };

struct Node {
    int id = 0;
    std::vector<box_index> boxes;  // sorted
    std::vector<std::vector<double>> representative_points;
    double diameter = 0;
    NodeAnnotation annotation = NodeAnnotation::isolated;
};

struct Edge {
    int from = 0;
    int to = 0;
    EdgeStrength strength = EdgeStrength::unclassified;
};

/// Recurrent SCCs as graph nodes, ordered (and id'ed) by smallest box index.
std::vector<Node> recurrent_nodes(const Condensation& c, const BoxMap& m);

/// Full transitive edge relation between nodes: (A,B) present iff B's SCC is
/// reachable from A's through the condensation DAG. Throws std::logic_error
/// if two distinct nodes are mutually reachable.
std::vector<Edge> chain_edges(const std::vector<Node>& nodes, const Condensation& c, const BoxMap& m);

/// Transitive reduction (covering relation) of a transitively closed DAG.
std::vector<std::pair<int, int>> adjacency_reduction(int node_count,
                                                     const std::vector<std::pair<int, int>>& edges);

std::vector<NodeAnnotation> classify_top_bottom(int node_count,
                                                const std::vector<std::pair<int, int>>& edges);

struct ConnectednessVerdict {
    bool connected = true;
    // witness bipartition when disconnected, plus the min distance between
    // the two parts (flags near-touching nodes where resolution may be the
    // culprit)
    std::vector<int> component_a, component_b;
    double min_gap = 0;
};

ConnectednessVerdict connectedness_check(const std::vector<Node>& nodes, const std::vector<Edge>& edges,
                                         const Grid& grid);

/// Restriction of the map to recurrent boxes plus boxes on condensation-DAG
/// paths between recurrent SCCs. Escaped boxes are dropped.
BoxMap prune_to_chain_recurrent(const BoxMap& m);

struct ChainGraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;                           // full transitive relation
    std::vector<std::pair<int, int>> reduced_edges;    // covering relation
    ConnectednessVerdict connectedness;

    const Node* node_containing(std::span<const double> p, const Grid& g) const;
    std::vector<std::pair<int, int>> edge_pairs() const;
};

/// scc -> nodes -> edges -> annotations -> connectedness in one pass.
ChainGraph assemble_chain_graph(const BoxMap& m);

}  // namespace chaingraph
