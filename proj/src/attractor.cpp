#include "chaingraph/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "chaingraph/util.hpp"

namespace chaingraph {

namespace {

// ring distance (in face steps) from each region cell to the region
// complement, by multi-source BFS; cells adjacent to non-region cells or to a
// non-periodic grid face start at 0
std::vector<std::int32_t> boundary_distance(const std::vector<box_index>& region, const Grid& g) {
    std::unordered_map<box_index, std::size_t> pos;
    pos.reserve(region.size() * 2);
    for (std::size_t i = 0; i < region.size(); ++i) pos[region[i]] = i;
    std::vector<std::int32_t> dist(region.size(), -1);
    std::queue<std::size_t> q;
    std::vector<std::uint64_t> cc;
    for (std::size_t i = 0; i < region.size(); ++i) {
        cc = g.coords_of(region[i]);
        bool boundary = false;
        for (int d = 0; d < g.dim() && !boundary; ++d) {
            for (int dir = -1; dir <= 1 && !boundary; dir += 2) {
                std::int64_t c = static_cast<std::int64_t>(cc[d]) + dir;
                std::int64_t n = static_cast<std::int64_t>(g.cells(d));
                if (c < 0 || c >= n) {
                    if (!g.periodic()[d]) {
                        boundary = true;
                        continue;
                    }
                    c = (c + n) % n;
                }
                std::uint64_t saved = cc[d];
                cc[d] = static_cast<std::uint64_t>(c);
                if (!pos.count(g.index_of(cc))) boundary = true;
                cc[d] = saved;
            }
        }
        if (boundary) {
            dist[i] = 0;
            q.push(i);
        }
    }
    while (!q.empty()) {
        std::size_t i = q.front();
        q.pop();
        cc = g.coords_of(region[i]);
        for (int d = 0; d < g.dim(); ++d) {
            for (int dir = -1; dir <= 1; dir += 2) {
                std::int64_t c = static_cast<std::int64_t>(cc[d]) + dir;
                std::int64_t n = static_cast<std::int64_t>(g.cells(d));
                if (c < 0 || c >= n) {
                    if (!g.periodic()[d]) continue;
                    c = (c + n) % n;
                }
                std::uint64_t saved = cc[d];
                cc[d] = static_cast<std::uint64_t>(c);
                auto it = pos.find(g.index_of(cc));
                cc[d] = saved;
                if (it != pos.end() && dist[it->second] < 0) {
                    dist[it->second] = dist[i] + 1;
                    q.push(it->second);
                }
            }
        }
    }
    return dist;
}

}  // namespace

TrappingVerdict verify_trapping(const BoxMap& m, const std::vector<box_index>& region) {
    TrappingVerdict v;
    v.region = region;
    std::sort(v.region.begin(), v.region.end());
    v.forward_invariant = true;

    auto dist = boundary_distance(v.region, m.grid);
    std::unordered_map<box_index, std::size_t> pos;
    pos.reserve(v.region.size() * 2);
    for (std::size_t i = 0; i < v.region.size(); ++i) pos[v.region[i]] = i;

    std::int32_t min_rings = std::numeric_limits<std::int32_t>::max();
    for (box_index b : v.region) {
        auto local = m.local_id(b);
        if (!local) {
            // region box missing from the map counts as unverifiable
            v.forward_invariant = false;
            continue;
        }
        if (m.is_escaped(b)) {
            ++v.escaped_count;
            v.forward_invariant = false;
            continue;
        }
        for (box_index s : m.succs(*local)) {
            auto it = pos.find(s);
            if (it == pos.end()) {
                ++v.outside_successors;
                v.forward_invariant = false;
            } else if (dist[it->second] >= 0) {
                min_rings = std::min(min_rings, dist[it->second]);
            }
        }
    }
    if (!v.forward_invariant) {
        v.margin = 0;
    } else if (min_rings == std::numeric_limits<std::int32_t>::max()) {
        v.margin = 0;
    } else {
        v.margin = static_cast<double>(min_rings) * m.grid.min_cell_width();
    }
    return v;
}

AttractorApprox global_attractor_outer(const BoxMap& m, const std::vector<box_index>& region,
                                       int max_iters) {
    if (region.empty()) throw std::invalid_argument("global_attractor_outer: empty region");
    AttractorApprox out;
    out.depth = m.grid.depth();
    if (max_iters <= 0) max_iters = static_cast<int>(region.size()) + 1;

    // local subgraph on region boxes, skipping escaped ones
    std::vector<box_index> cur;
    cur.reserve(region.size());
    for (box_index b : region)
        if (m.local_id(b) && !m.is_escaped(b)) cur.push_back(b);
    std::sort(cur.begin(), cur.end());

    std::vector<char> alive(cur.size(), 1);
    auto id_of = [&](box_index b) -> std::int64_t {
        auto it = std::lower_bound(cur.begin(), cur.end(), b);
        if (it == cur.end() || *it != b) return -1;
        return it - cur.begin();
    };

    for (int pass = 0; pass < max_iters; ++pass) {
        std::vector<std::int32_t> indeg(cur.size(), 0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!alive[i]) continue;
            auto local = m.local_id(cur[i]);
            for (box_index s : m.succs(*local)) {
                std::int64_t j = id_of(s);
                if (j >= 0 && alive[j]) ++indeg[j];
            }
        }
        bool removed = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (alive[i] && indeg[i] == 0) {
                alive[i] = 0;
                removed = true;
            }
        }
        ++out.iterations;
        if (!removed) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < cur.size(); ++i)
        if (alive[i]) out.boxes.push_back(cur[i]);
    return out;
}

AttractorApprox global_attractor_outer(const BoxMap& m, const TrappingVerdict& verdict, int max_iters) {
    if (!verdict.forward_invariant)
        throw std::invalid_argument(
            "global_attractor_outer: region is not trapping (escaped_count=" +
            std::to_string(verdict.escaped_count) +
            ", outside_successors=" + std::to_string(verdict.outside_successors) + ")");
    return global_attractor_outer(m, verdict.region, max_iters);
}

bool connectedness_of_attractor(const std::vector<box_index>& boxes, const Grid& g) {
    if (boxes.empty()) return false;
    auto comp = face_components(boxes, g);
    return *std::max_element(comp.begin(), comp.end()) == 0;
}

namespace {

double overlap_fraction(const std::vector<box_index>& a, const std::vector<box_index>& b) {
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++inter;
            ++i;
            ++j;
        }
    }
    return a.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(a.size());
}

}  // namespace

GraphComparison compare_chain_graphs(const ChainGraph& g1, const ChainGraph& g2, const Grid& grid) {
    GraphComparison cmp;
    const int n1 = static_cast<int>(g1.nodes.size());
    const int n2 = static_cast<int>(g2.nodes.size());
    cmp.matching.assign(n1, -1);
    std::vector<int> back(n2, -1);
    for (int i = 0; i < n1; ++i) {
        int best = -1;
        double best_f = 0;
        for (int j = 0; j < n2; ++j) {
            double f = overlap_fraction(g1.nodes[i].boxes, g2.nodes[j].boxes);
            if (f > best_f) {
                best_f = f;
                best = j;
            }
        }
        if (best >= 0 && best_f >= 0.5 &&
            overlap_fraction(g2.nodes[best].boxes, g1.nodes[i].boxes) >= 0.5 && back[best] < 0) {
            cmp.matching[i] = best;
            back[best] = i;
        }
    }
    for (int i = 0; i < n1; ++i)
        if (cmp.matching[i] < 0) ++cmp.unmatched_1;
    for (int j = 0; j < n2; ++j)
        if (back[j] < 0) ++cmp.unmatched_2;
    cmp.nodes_match = (cmp.unmatched_1 == 0 && cmp.unmatched_2 == 0);

    if (cmp.nodes_match) {
        std::set<std::pair<int, int>> e1, e2;
        for (const Edge& e : g1.edges) e1.insert({cmp.matching[e.from], cmp.matching[e.to]});
        for (const Edge& e : g2.edges) e2.insert({e.from, e.to});
        cmp.edges_match = (e1 == e2);

        // one-box-layer slack between matched box sets
        double w = grid.max_cell_width();
        cmp.max_boxset_gap = 0;
        for (int i = 0; i < n1; ++i) {
            const auto& a = g1.nodes[i].boxes;
            const auto& b = g2.nodes[cmp.matching[i]].boxes;
            for (box_index x : a)
                if (!std::binary_search(b.begin(), b.end(), x))
                    cmp.max_boxset_gap = std::max(cmp.max_boxset_gap, set_distance({x}, b, grid));
            for (box_index x : b)
                if (!std::binary_search(a.begin(), a.end(), x))
                    cmp.max_boxset_gap = std::max(cmp.max_boxset_gap, set_distance({x}, a, grid));
        }
        cmp.equal = cmp.edges_match && cmp.max_boxset_gap <= w + 1e-12;
    }
    return cmp;
}

}  // namespace chaingraph
