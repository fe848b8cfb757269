#pragma once

#include <vector>

#include "chaingraph/boxmap.hpp"

namespace chaingraph {

/// Box-level forward invariance of a region: every region box keeps its
/// successors inside the region and none escaped. `margin` is a conservative
/// lower bound (in phase-space units) on the distance from image cells to the
/// region complement; 0 when images touch the boundary or the check fails.
struct TrappingVerdict {
    std::vector<box_index> region;
    bool forward_invariant = false;
    double margin = 0;
    std::int64_t escaped_count = 0;
    std::int64_t outside_successors = 0;  // successor cells falling outside the region
};

TrappingVerdict verify_trapping(const BoxMap& m, const std::vector<box_index>& region);

/// Outer approximation of omega(Q) by iterated predecessor pruning: a pass
/// removes every box with no predecessor inside the current set; the fixed
/// point is the maximal subgraph in which every box is reachable from within.
struct AttractorApprox {
    std::vector<box_index> boxes;
    std::vector<int> depth;
    int iterations = 0;
    bool converged = false;
};

AttractorApprox global_attractor_outer(const BoxMap& m, const std::vector<box_index>& region,
                                       int max_iters = 0);

/// Certified variant: throws std::invalid_argument when the verdict is not
/// forward invariant. The plain overload computes an uncertified candidate.
AttractorApprox global_attractor_outer(const BoxMap& m, const TrappingVerdict& verdict,
                                       int max_iters = 0);

/// True iff the box union is face-connected.
bool connectedness_of_attractor(const std::vector<box_index>& boxes, const Grid& g);

/// Node matching between two chain graphs on the same grid, by box overlap.
struct GraphComparison {
    // matching[i] = node id in g2 matched to node i of g1, or -1
    std::vector<int> matching;
    int unmatched_1 = 0, unmatched_2 = 0;
    bool nodes_match = false;        // bijective matching, overlap >= 50% both ways
    bool edges_match = false;        // identical edge relations under the matching
    double max_boxset_gap = 0;       // largest distance from a symmetric-difference box
                                     // to the other node's box set (one-box-layer slack)
    bool equal = false;
};

GraphComparison compare_chain_graphs(const ChainGraph& g1, const ChainGraph& g2, const Grid& grid);

}  // namespace chaingraph
