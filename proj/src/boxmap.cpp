#include "chaingraph/boxmap.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

#include "chaingraph/util.hpp"

namespace chaingraph {

std::optional<std::size_t> BoxMap::local_id(box_index b) const {
    auto it = std::lower_bound(boxes.begin(), boxes.end(), b);
    if (it == boxes.end() || *it != b) return std::nullopt;
    return static_cast<std::size_t>(it - boxes.begin());
}

std::span<const box_index> BoxMap::succs(std::size_t local) const {
    return {successors.data() + succ_offsets[local], successors.data() + succ_offsets[local + 1]};
}

bool BoxMap::is_escaped(box_index b) const {
    return std::binary_search(escaped.begin(), escaped.end(), b);
}

namespace {

struct HullRaster {
    const Grid* grid;
    // cells of [lo,hi] (after clipping non-periodic dims); empty if the
    // clipped hull is void
    void cells(const std::vector<double>& lo, const std::vector<double>& hi, std::vector<box_index>& out) const {
        const Grid& g = *grid;
        int dim = g.dim();
        std::vector<std::int64_t> c0(dim), c1(dim);
        for (int d = 0; d < dim; ++d) {
            double glo = g.bounds().lo[d], ghi = g.bounds().hi[d];
            double span = ghi - glo;
            std::int64_t n = static_cast<std::int64_t>(g.cells(d));
            double a = lo[d], b = hi[d];
            if (g.periodic()[d]) {
                if (b - a >= span) {
                    c0[d] = 0;
                    c1[d] = n - 1;
                    continue;
                }
                c0[d] = static_cast<std::int64_t>(std::floor((a - glo) / span * n));
                c1[d] = static_cast<std::int64_t>(std::floor((b - glo) / span * n));
                if (c1[d] < c0[d]) c1[d] += n;
                if (c1[d] - c0[d] + 1 > n) c1[d] = c0[d] + n - 1;
            } else {
                a = std::max(a, glo);
                b = std::min(b, ghi);
                if (a > b) return;  // hull entirely outside
                c0[d] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((a - glo) / span * n)), 0, n - 1);
                c1[d] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((b - glo) / span * n)), 0, n - 1);
            }
        }
        std::vector<std::uint64_t> cc(dim);
        std::vector<std::int64_t> cur(c0);
        while (true) {
            for (int d = 0; d < dim; ++d) {
                std::int64_t n = static_cast<std::int64_t>(grid->cells(d));
                cc[d] = static_cast<std::uint64_t>(((cur[d] % n) + n) % n);
            }
            out.push_back(g.index_of(cc));
            int d = dim - 1;
            while (d >= 0) {
                if (++cur[d] <= c1[d]) break;
                cur[d] = c0[d];
                --d;
            }
            if (d < 0) break;
        }
    }

    std::size_t count(const std::vector<double>& lo, const std::vector<double>& hi) const {
        const Grid& g = *grid;
        std::size_t total = 1;
        for (int d = 0; d < g.dim(); ++d) {
            double glo = g.bounds().lo[d], ghi = g.bounds().hi[d];
            double span = ghi - glo;
            std::int64_t n = static_cast<std::int64_t>(g.cells(d));
            double a = lo[d], b = hi[d];
            if (!g.periodic()[d]) {
                a = std::max(a, glo);
                b = std::min(b, ghi);
                if (a > b) return 0;
            } else if (b - a >= span) {
                total *= static_cast<std::size_t>(n);
                continue;
            }
            std::int64_t w = static_cast<std::int64_t>(std::floor((b - glo) / span * n)) -
                             static_cast<std::int64_t>(std::floor((a - glo) / span * n)) + 1;
            w = std::clamp<std::int64_t>(w, 1, n);
            total *= static_cast<std::size_t>(w);
        }
        return total;
    }
};

struct SamplePoint {
    StateVec y;
};

// single-linkage clusters with per-dimension link distance
std::vector<std::vector<int>> cluster_points(const std::vector<StateVec>& pts, const std::vector<double>& link) {
    int n = static_cast<int>(pts.size());
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        std::vector<int> cl = {i};
        comp[i] = static_cast<int>(out.size());
        for (std::size_t k = 0; k < cl.size(); ++k) {
            for (int j = 0; j < n; ++j) {
                if (comp[j] >= 0) continue;
                bool close = true;
                for (int d = 0; d < pts[i].size() && close; ++d)
                    if (std::abs(pts[cl[k]][d] - pts[j][d]) > link[d]) close = false;
                if (close) {
                    comp[j] = comp[i];
                    cl.push_back(j);
                }
            }
        }
        out.push_back(std::move(cl));
    }
    return out;
}

}  // namespace

BoxMap build_box_map(const SystemEvaluator& sys, const Grid& grid, const SamplingConfig& cfg) {
    if (grid.box_count() > (std::uint64_t(1) << 24))
        throw std::invalid_argument("build_box_map: full grid too large; pass an active set");
    std::vector<box_index> all(grid.box_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return build_box_map(sys, grid, cfg, std::move(all));
}

BoxMap build_box_map(const SystemEvaluator& sys, const Grid& grid, const SamplingConfig& cfg,
                     std::vector<box_index> active) {
    if (active.empty()) throw std::invalid_argument("build_box_map: empty active set");
    if (grid.dim() != sys.dim()) throw std::invalid_argument("build_box_map: grid/system dimension mismatch");
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());

    const int dim = grid.dim();
    const std::size_t n = active.size();
    std::vector<std::vector<box_index>> succ(n);
    std::vector<char> esc(n, 0);

    std::vector<double> cellw(dim);
    for (int d = 0; d < dim; ++d) cellw[d] = grid.cell_width(d);

    HullRaster raster{&grid};

    parallel_for(n, [&](std::size_t i) {
        Box cell = grid.cell_bounds(active[i]);
        std::vector<std::vector<double>> stencil;
        auto mid = cell.center();
        if (cfg.corners) {
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << dim); ++mask) {
                std::vector<double> p(dim);
                for (int d = 0; d < dim; ++d) p[d] = (mask >> d & 1) ? cell.hi[d] : cell.lo[d];
                stencil.push_back(std::move(p));
            }
        }
        if (cfg.center) stencil.push_back(mid);
        if (cfg.face_midpoints && dim > 1) {
            for (int d = 0; d < dim; ++d) {
                for (double v : {cell.lo[d], cell.hi[d]}) {
                    auto p = mid;
                    p[d] = v;
                    stencil.push_back(std::move(p));
                }
            }
        }
        if (cfg.extra_random > 0) {
            SplitMix rng(mix64(cfg.seed ^ mix64(active[i] + 0x51ed2701)));
            for (int k = 0; k < cfg.extra_random; ++k) {
                std::vector<double> p(dim);
                for (int d = 0; d < dim; ++d) p[d] = rng.uniform(cell.lo[d], cell.hi[d]);
                stencil.push_back(std::move(p));
            }
        }

        std::vector<StateVec> images;
        images.reserve(stencil.size());
        for (auto& p : stencil) {
            EvalResult r = sys.step(p);
            if (!r.ok()) {
                esc[i] = 1;
                return;
            }
            images.push_back(r.y);
        }

        // raw-image escape: a sample image beyond non-periodic bounds means
        // the box genuinely leaves the grid
        for (auto& im : images) {
            for (int d = 0; d < dim; ++d) {
                if (grid.periodic()[d]) continue;
                if (im[d] < grid.bounds().lo[d] || im[d] > grid.bounds().hi[d]) {
                    esc[i] = 1;
                    break;
                }
            }
            if (esc[i]) break;
        }

        auto hull_of = [&](std::span<const int> idxs, std::vector<double>& lo, std::vector<double>& hi) {
            lo.assign(dim, std::numeric_limits<double>::infinity());
            hi.assign(dim, -std::numeric_limits<double>::infinity());
            for (int k : idxs) {
                for (int d = 0; d < dim; ++d) {
                    lo[d] = std::min(lo[d], images[k][d]);
                    hi[d] = std::max(hi[d], images[k][d]);
                }
            }
            for (int d = 0; d < dim; ++d) {
                double bl = cfg.bloat_factor * 0.5 * (hi[d] - lo[d]) + 0.5 * cellw[d];
                lo[d] -= bl;
                hi[d] += bl;
            }
        };

        std::vector<int> all_idx(images.size());
        for (std::size_t k = 0; k < images.size(); ++k) all_idx[k] = static_cast<int>(k);
        std::vector<double> hlo, hhi;
        hull_of(all_idx, hlo, hhi);

        std::vector<box_index> cells;
        if (raster.count(hlo, hhi) <= cfg.max_hull_cells) {
            raster.cells(hlo, hhi, cells);
        } else {
            // oversized hull: the stencil straddles a discontinuity of the
            // section map; bloat per sample cluster instead of the union
            std::vector<double> link(dim);
            for (int d = 0; d < dim; ++d) link[d] = 8.0 * cellw[d];
            auto clusters = cluster_points(images, link);
            for (auto& cl : clusters) {
                hull_of(cl, hlo, hhi);
                std::size_t cnt = raster.count(hlo, hhi);
                if (cnt > cfg.max_hull_cells) {
                    // still huge: clamp the bloat to the link radius
                    std::vector<double> llo(dim), lhi(dim);
                    for (int d = 0; d < dim; ++d) {
                        llo[d] = std::numeric_limits<double>::infinity();
                        lhi[d] = -std::numeric_limits<double>::infinity();
                    }
                    for (int k : cl)
                        for (int d = 0; d < dim; ++d) {
                            llo[d] = std::min(llo[d], images[k][d] - link[d]);
                            lhi[d] = std::max(lhi[d], images[k][d] + link[d]);
                        }
                    raster.cells(llo, lhi, cells);
                } else {
                    raster.cells(hlo, hhi, cells);
                }
            }
        }
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        succ[i] = std::move(cells);
    });

    BoxMap m;
    m.grid = grid;
    m.boxes = std::move(active);
    m.succ_offsets.resize(n + 1, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m.succ_offsets[i] = total;
        total += succ[i].size();
    }
    m.succ_offsets[n] = total;
    m.successors.reserve(total);
    for (std::size_t i = 0; i < n; ++i)
        m.successors.insert(m.successors.end(), succ[i].begin(), succ[i].end());
    for (std::size_t i = 0; i < n; ++i)
        if (esc[i]) m.escaped.push_back(m.boxes[i]);
    return m;
}

namespace {

// successor lists rewritten to local ids, dropping escaped boxes and targets
// outside the active set
struct LocalGraph {
    std::vector<std::uint64_t> off;
    std::vector<std::int32_t> adj;
    std::vector<char> escaped;
};

LocalGraph local_graph(const BoxMap& m) {
    const std::size_t n = m.size();
    LocalGraph g;
    g.escaped.assign(n, 0);
    for (box_index e : m.escaped) {
        auto id = m.local_id(e);
        if (id) g.escaped[*id] = 1;
    }
    g.off.resize(n + 1, 0);
    std::vector<std::vector<std::int32_t>> adj(n);
    parallel_for(n, [&](std::size_t i) {
        if (g.escaped[i]) return;
        auto ss = m.succs(i);
        auto& out = adj[i];
        out.reserve(ss.size());
        for (box_index s : ss) {
            auto id = m.local_id(s);
            if (id && !g.escaped[*id]) out.push_back(static_cast<std::int32_t>(*id));
        }
    });
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        g.off[i] = total;
        total += adj[i].size();
    }
    g.off[n] = total;
    g.adj.reserve(total);
    for (std::size_t i = 0; i < n; ++i) g.adj.insert(g.adj.end(), adj[i].begin(), adj[i].end());
    return g;
}

}  // namespace

Condensation scc_condensation(const BoxMap& m) {
    const std::size_t n = m.size();
    LocalGraph g = local_graph(m);

    Condensation c;
    c.scc_of.assign(n, -1);

    // iterative Tarjan
    std::vector<std::int64_t> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::int32_t> stack;
    struct Frame {
        std::int32_t v;
        std::uint64_t next;  // cursor into g.adj
    };
    std::vector<Frame> frames;
    std::int64_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0 || g.escaped[root]) continue;
        frames.push_back({static_cast<std::int32_t>(root), g.off[root]});
        index[root] = low[root] = counter++;
        stack.push_back(static_cast<std::int32_t>(root));
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < g.off[f.v + 1]) {
                std::int32_t w = g.adj[f.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, g.off[w]});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                std::int32_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                if (low[v] == index[v]) {
                    std::vector<std::int32_t> members;
                    while (true) {
                        std::int32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        c.scc_of[w] = c.scc_count;
                        members.push_back(w);
                        if (w == v) break;
                    }
                    std::sort(members.begin(), members.end());
                    c.members.push_back(std::move(members));
                    ++c.scc_count;
                }
            }
        }
    }

    // condensation DAG + recurrence flags
    c.dag.assign(c.scc_count, {});
    c.recurrent.assign(c.scc_count, false);
    for (std::size_t v = 0; v < n; ++v) {
        if (g.escaped[v]) continue;
        std::int32_t sv = c.scc_of[v];
        for (std::uint64_t e = g.off[v]; e < g.off[v + 1]; ++e) {
            std::int32_t sw = c.scc_of[g.adj[e]];
            if (sw == sv) {
                if (g.adj[e] == static_cast<std::int32_t>(v)) c.recurrent[sv] = true;  // self-successor
            } else {
                c.dag[sv].push_back(sw);
            }
        }
    }
    for (auto& d : c.dag) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }
    for (std::int32_t s = 0; s < c.scc_count; ++s)
        if (c.members[s].size() > 1) c.recurrent[s] = true;
    return c;
}

namespace {

// closures of two cell sets intersect iff some cell of the smaller set has a
// Chebyshev-1 neighbor (or itself) in the larger set
bool box_sets_touch(const std::vector<box_index>& a, const std::vector<box_index>& b, const Grid& g) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& big = a.size() <= b.size() ? b : a;
    const int dim = g.dim();
    std::vector<std::uint64_t> cc(dim);
    std::vector<std::int64_t> off(dim, -1);
    for (box_index cell : small) {
        auto base = g.coords_of(cell);
        off.assign(dim, -1);
        while (true) {
            bool valid = true;
            for (int d = 0; d < dim && valid; ++d) {
                std::int64_t c = static_cast<std::int64_t>(base[d]) + off[d];
                std::int64_t n = static_cast<std::int64_t>(g.cells(d));
                if (c < 0 || c >= n) {
                    if (g.periodic()[d] && n > 1)
                        c = (c + n) % n;
                    else
                        valid = false;
                }
                if (valid) cc[d] = static_cast<std::uint64_t>(c);
            }
            if (valid && std::binary_search(big.begin(), big.end(), g.index_of(cc))) return true;
            int d = dim - 1;
            while (d >= 0) {
                if (++off[d] <= 1) break;
                off[d] = -1;
                --d;
            }
            if (d < 0) break;
        }
    }
    return false;
}

struct union_find {
    std::vector<int> parent;
    explicit union_find(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Recurrent SCCs whose box closures touch approximate one connected set of
// chain-recurrent points and therefore one node; SCC groups that reach each
// other through transient chains are likewise mutually downstream at this
// resolution. Returns the group id per recurrent SCC (ids dense from 0).
std::vector<int> group_recurrent_sccs(const Condensation& c, const BoxMap& m,
                                      const std::vector<std::int32_t>& rec) {
    const int na = static_cast<int>(rec.size());
    std::vector<std::vector<box_index>> atom_boxes(na);
    for (int i = 0; i < na; ++i) {
        for (std::int32_t local : c.members[rec[i]]) atom_boxes[i].push_back(m.boxes[local]);
        std::sort(atom_boxes[i].begin(), atom_boxes[i].end());
    }
    union_find uf(na);
    for (int i = 0; i < na; ++i)
        for (int j = i + 1; j < na; ++j)
            if (uf.find(i) != uf.find(j) && box_sets_touch(atom_boxes[i], atom_boxes[j], m.grid))
                uf.unite(i, j);

    // atom-level downstream reachability over the condensation DAG
    std::vector<int> atom_of_scc(c.scc_count, -1);
    for (int i = 0; i < na; ++i) atom_of_scc[rec[i]] = i;
    const int words = (na + 63) / 64;
    std::vector<std::uint64_t> reach(static_cast<std::size_t>(c.scc_count) * words, 0);
    for (std::int32_t s = 0; s < c.scc_count; ++s) {
        auto* row = reach.data() + static_cast<std::size_t>(s) * words;
        for (std::int32_t t : c.dag[s]) {
            const auto* trow = reach.data() + static_cast<std::size_t>(t) * words;
            for (int w = 0; w < words; ++w) row[w] |= trow[w];
            if (atom_of_scc[t] >= 0) row[atom_of_scc[t] / 64] |= (std::uint64_t(1) << (atom_of_scc[t] % 64));
        }
    }
    // merge groups that are mutually reachable
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < na; ++i) {
            const auto* ri = reach.data() + static_cast<std::size_t>(rec[i]) * words;
            for (int j = 0; j < na; ++j) {
                if (uf.find(i) == uf.find(j)) continue;
                if (!(ri[j / 64] >> (j % 64) & 1)) continue;
                const auto* rj = reach.data() + static_cast<std::size_t>(rec[j]) * words;
                if (rj[i / 64] >> (i % 64) & 1) {
                    uf.unite(i, j);
                    changed = true;
                }
            }
        }
    }
    std::vector<int> group(na);
    std::vector<int> remap;
    for (int i = 0; i < na; ++i) {
        int r = uf.find(i);
        auto it = std::find(remap.begin(), remap.end(), r);
        if (it == remap.end()) {
            remap.push_back(r);
            group[i] = static_cast<int>(remap.size()) - 1;
        } else {
            group[i] = static_cast<int>(it - remap.begin());
        }
    }
    return group;
}

}  // namespace

std::vector<Node> recurrent_nodes(const Condensation& c, const BoxMap& m) {
    std::vector<std::int32_t> rec;
    for (std::int32_t s = 0; s < c.scc_count; ++s)
        if (c.recurrent[s]) rec.push_back(s);
    auto group = group_recurrent_sccs(c, m, rec);
    int ngroups = rec.empty() ? 0 : 1 + *std::max_element(group.begin(), group.end());

    std::vector<std::vector<box_index>> boxes(ngroups);
    for (std::size_t i = 0; i < rec.size(); ++i)
        for (std::int32_t local : c.members[rec[i]]) boxes[group[i]].push_back(m.boxes[local]);
    for (auto& b : boxes) std::sort(b.begin(), b.end());

    // deterministic node order: by smallest box index
    std::vector<int> order(ngroups);
    for (int i = 0; i < ngroups; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return boxes[a][0] < boxes[b][0]; });

    std::vector<Node> nodes;
    nodes.reserve(ngroups);
    for (int k = 0; k < ngroups; ++k) {
        Node nd;
        nd.id = k;
        nd.boxes = std::move(boxes[order[k]]);
        std::size_t stride = std::max<std::size_t>(1, nd.boxes.size() / 8);
        for (std::size_t i = 0; i < nd.boxes.size() && nd.representative_points.size() < 8; i += stride)
            nd.representative_points.push_back(m.grid.cell_bounds(nd.boxes[i]).center());
        nd.diameter = bounding_box(nd.boxes, m.grid).diameter();
        nodes.push_back(std::move(nd));
    }
    return nodes;
}

std::vector<Edge> chain_edges(const std::vector<Node>& nodes, const Condensation& c, const BoxMap& m) {
    const int nn = static_cast<int>(nodes.size());
    if (nn == 0) return {};
    // node id per scc (a node may span several touching SCCs)
    std::vector<int> node_of(c.scc_count, -1);
    for (int k = 0; k < nn; ++k)
        for (box_index b : nodes[k].boxes) {
            auto id = m.local_id(b);
            if (id && c.scc_of[*id] >= 0) node_of[c.scc_of[*id]] = k;
        }
    // downstream-reachable recurrent nodes per scc; emission order is
    // sinks-first, so successors are already resolved
    const int words = (nn + 63) / 64;
    std::vector<std::uint64_t> reach(static_cast<std::size_t>(c.scc_count) * words, 0);
    for (std::int32_t s = 0; s < c.scc_count; ++s) {
        auto* row = reach.data() + static_cast<std::size_t>(s) * words;
        for (std::int32_t t : c.dag[s]) {
            const auto* trow = reach.data() + static_cast<std::size_t>(t) * words;
            for (int w = 0; w < words; ++w) row[w] |= trow[w];
            if (node_of[t] >= 0) row[node_of[t] / 64] |= (std::uint64_t(1) << (node_of[t] % 64));
        }
    }
    std::set<std::pair<int, int>> pairs;
    for (std::int32_t s = 0; s < c.scc_count; ++s) {
        int a = node_of[s];
        if (a < 0) continue;
        const auto* row = reach.data() + static_cast<std::size_t>(s) * words;
        for (int b = 0; b < nn; ++b)
            if (b != a && (row[b / 64] >> (b % 64) & 1)) pairs.insert({a, b});
    }
    // acyclicity of the node relation; mutually reaching SCC groups were
    // merged while building nodes, so a 2-cycle here is an internal error
    for (auto& [a, b] : pairs)
        if (pairs.count({b, a}))
            throw std::logic_error("chain_edges: cycle between distinct nodes (SCCs should have merged)");
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto& [a, b] : pairs) edges.push_back({a, b, EdgeStrength::unclassified});
    return edges;
}

std::vector<std::pair<int, int>> adjacency_reduction(int node_count,
                                                     const std::vector<std::pair<int, int>>& edges) {
    std::vector<char> has(static_cast<std::size_t>(node_count) * node_count, 0);
    for (auto& [a, b] : edges) has[static_cast<std::size_t>(a) * node_count + b] = 1;
    std::vector<std::pair<int, int>> out;
    for (auto& [a, b] : edges) {
        bool implied = false;
        for (int c = 0; c < node_count && !implied; ++c) {
            if (c == a || c == b) continue;
            if (has[static_cast<std::size_t>(a) * node_count + c] &&
                has[static_cast<std::size_t>(c) * node_count + b])
                implied = true;
        }
        if (!implied) out.push_back({a, b});
    }
    return out;
}

std::vector<NodeAnnotation> classify_top_bottom(int node_count,
                                                const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> indeg(node_count, 0), outdeg(node_count, 0);
    for (auto& [a, b] : edges) {
        ++outdeg[a];
        ++indeg[b];
    }
    std::vector<NodeAnnotation> out(node_count);
    for (int i = 0; i < node_count; ++i) {
        bool top = indeg[i] == 0, bottom = outdeg[i] == 0;
        out[i] = top && bottom ? NodeAnnotation::isolated
                 : top         ? NodeAnnotation::top
                 : bottom      ? NodeAnnotation::bottom
                               : NodeAnnotation::saddle;
    }
    return out;
}

ConnectednessVerdict connectedness_check(const std::vector<Node>& nodes, const std::vector<Edge>& edges,
                                         const Grid& grid) {
    if (nodes.empty()) throw std::invalid_argument("connectedness_check: empty graph");
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<int>> und(n);
    for (const Edge& e : edges) {
        und[e.from].push_back(e.to);
        und[e.to].push_back(e.from);
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::queue<int> q;
        q.push(s);
        comp[s] = ncomp;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : und[v])
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    q.push(w);
                }
        }
        ++ncomp;
    }
    ConnectednessVerdict v;
    if (ncomp == 1) return v;
    v.connected = false;
    for (int i = 0; i < n; ++i) (comp[i] == 0 ? v.component_a : v.component_b).push_back(i);
    v.min_gap = std::numeric_limits<double>::infinity();
    for (int a : v.component_a)
        for (int b : v.component_b)
            v.min_gap = std::min(v.min_gap, set_distance(nodes[a].boxes, nodes[b].boxes, grid));
    return v;
}

BoxMap prune_to_chain_recurrent(const BoxMap& m) {
    Condensation c = scc_condensation(m);
    // forward-reachable-from-recurrent in topological order (reverse emission),
    // backward in emission order
    std::vector<char> fwd(c.scc_count, 0), bwd(c.scc_count, 0);
    for (std::int32_t s = c.scc_count - 1; s >= 0; --s) {
        bool from_here = fwd[s] || c.recurrent[s];
        if (!from_here) continue;
        for (std::int32_t t : c.dag[s]) fwd[t] = 1;
    }
    for (std::int32_t s = 0; s < c.scc_count; ++s) {
        for (std::int32_t t : c.dag[s])
            if (bwd[t] || c.recurrent[t]) bwd[s] = 1;
    }
    std::vector<char> keep_local(m.size(), 0);
    for (std::int32_t s = 0; s < c.scc_count; ++s) {
        if (!(c.recurrent[s] || (fwd[s] && bwd[s]))) continue;
        for (std::int32_t v : c.members[s]) keep_local[v] = 1;
    }

    BoxMap out;
    out.grid = m.grid;
    std::vector<std::size_t> new_id(m.size(), SIZE_MAX);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (keep_local[i]) {
            new_id[i] = out.boxes.size();
            out.boxes.push_back(m.boxes[i]);
        }
    out.succ_offsets.resize(out.boxes.size() + 1, 0);
    std::size_t total = 0;
    std::vector<std::vector<box_index>> kept_succ(out.boxes.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!keep_local[i]) continue;
        auto& dst = kept_succ[new_id[i]];
        for (box_index s : m.succs(i)) {
            auto id = m.local_id(s);
            if (id && keep_local[*id]) dst.push_back(s);
        }
    }
    for (std::size_t i = 0; i < kept_succ.size(); ++i) {
        out.succ_offsets[i] = total;
        total += kept_succ[i].size();
    }
    out.succ_offsets[kept_succ.size()] = total;
    out.successors.reserve(total);
    for (auto& v : kept_succ) out.successors.insert(out.successors.end(), v.begin(), v.end());
    return out;
}

const Node* ChainGraph::node_containing(std::span<const double> p, const Grid& g) const {
    auto idx = g.box_of(p);
    if (!idx) return nullptr;
    for (const Node& n : nodes)
        if (std::binary_search(n.boxes.begin(), n.boxes.end(), *idx)) return &n;
    return nullptr;
}

std::vector<std::pair<int, int>> ChainGraph::edge_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges.size());
    for (const Edge& e : edges) out.push_back({e.from, e.to});
    return out;
}

ChainGraph assemble_chain_graph(const BoxMap& m) {
    ChainGraph g;
    Condensation c = scc_condensation(m);
    g.nodes = recurrent_nodes(c, m);
    g.edges = chain_edges(g.nodes, c, m);
    g.reduced_edges = adjacency_reduction(static_cast<int>(g.nodes.size()), g.edge_pairs());
    auto ann = classify_top_bottom(static_cast<int>(g.nodes.size()), g.edge_pairs());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) g.nodes[i].annotation = ann[i];
    if (!g.nodes.empty()) g.connectedness = connectedness_check(g.nodes, g.edges, m.grid);
    return g;
}

}  // namespace chaingraph
