#include "chaingraph/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "chaingraph/util.hpp"

namespace chaingraph {

PointCloud::PointCloud(const SystemEvaluator& sys, const Box& domain, double spacing,
                       std::size_t max_points)
    : domain_(domain), spacing_(spacing), dim_(domain.dim()) {
    if (!(spacing > 0)) throw std::invalid_argument("PointCloud: spacing must be positive");
    lattice_dims_.resize(dim_);
    count_ = 1;
    for (int d = 0; d < dim_; ++d) {
        lattice_dims_[d] = static_cast<std::size_t>(std::floor(domain.width(d) / spacing)) + 1;
        count_ *= lattice_dims_[d];
        if (count_ > max_points) throw std::invalid_argument("PointCloud: lattice exceeds point budget");
    }
    images_.assign(count_ * dim_, std::numeric_limits<double>::quiet_NaN());
    image_ok_.assign(count_, 0);
    parallel_for(count_, [&](std::size_t i) {
        auto p = point(i);
        EvalResult r = sys.step(p);
        if (r.ok()) {
            image_ok_[i] = 1;
            for (int d = 0; d < dim_; ++d) images_[i * dim_ + d] = r.y[d];
        }
    });
}

std::vector<double> PointCloud::point(std::size_t i) const {
    std::vector<double> p(dim_);
    for (int d = dim_ - 1; d >= 0; --d) {
        p[d] = domain_.lo[d] + spacing_ * static_cast<double>(i % lattice_dims_[d]);
        i /= lattice_dims_[d];
    }
    return p;
}

std::size_t PointCloud::snap(std::span<const double> p) const {
    std::size_t idx = 0;
    for (int d = 0; d < dim_; ++d) {
        double t = (p[d] - domain_.lo[d]) / spacing_;
        auto c = static_cast<std::int64_t>(std::llround(t));
        c = std::clamp<std::int64_t>(c, 0, static_cast<std::int64_t>(lattice_dims_[d]) - 1);
        idx = idx * lattice_dims_[d] + static_cast<std::size_t>(c);
    }
    return idx;
}

void PointCloud::bfs(std::size_t start, double eps, std::vector<std::int32_t>& dist) const {
    dist.assign(count_, -1);
    // neighbor enumeration: lattice points within eps of an image point
    const int reach = static_cast<int>(std::floor(eps / spacing_)) + 1;
    std::queue<std::size_t> q;

    auto expand = [&](std::size_t from, std::int32_t dfrom) {
        if (!image_ok_[from]) return;
        const double* img = images_.data() + from * dim_;
        // coordinates of the lattice box around the image
        std::vector<std::int64_t> base(dim_), off(dim_, -reach);
        bool inside = true;
        for (int d = 0; d < dim_; ++d) {
            base[d] = static_cast<std::int64_t>(std::llround((img[d] - domain_.lo[d]) / spacing_));
            if (base[d] < -reach || base[d] > static_cast<std::int64_t>(lattice_dims_[d]) + reach)
                inside = false;
        }
        if (!inside) return;  // image far outside the lattice
        while (true) {
            bool valid = true;
            std::size_t idx = 0;
            double dd = 0;
            for (int d = 0; d < dim_ && valid; ++d) {
                std::int64_t c = base[d] + off[d];
                if (c < 0 || c >= static_cast<std::int64_t>(lattice_dims_[d])) {
                    valid = false;
                    break;
                }
                double coord = domain_.lo[d] + spacing_ * static_cast<double>(c);
                double delta = coord - img[d];
                dd += delta * delta;
                idx = idx * lattice_dims_[d] + static_cast<std::size_t>(c);
            }
            if (valid && dd < eps * eps && dist[idx] < 0) {
                dist[idx] = dfrom + 1;
                q.push(idx);
            }
            int d = dim_ - 1;
            while (d >= 0) {
                if (++off[d] <= reach) break;
                off[d] = -reach;
                --d;
            }
            if (d < 0) break;
        }
    };

    expand(start, 0);
    while (!q.empty()) {
        std::size_t i = q.front();
        q.pop();
        expand(i, dist[i]);
    }
}

bool PointCloud::epsilon_chain_exists(std::span<const double> x, std::span<const double> y,
                                      double eps) const {
    return min_chain_length(x, y, eps).has_value();
}

std::optional<int> PointCloud::min_chain_length(std::span<const double> x, std::span<const double> y,
                                                double eps) const {
    if (eps <= spacing_)
        throw std::invalid_argument(
            "epsilon_chain_exists: eps must exceed the lattice spacing, otherwise the lattice cannot "
            "realize chains");
    std::size_t sx = snap(x), sy = snap(y);
    std::vector<std::int32_t> dist;
    bfs(sx, eps, dist);
    if (dist[sy] < 0) return std::nullopt;
    return dist[sy] + 1;  // chain z_1..z_k has k = hops + 1 >= 2
}

DownstreamResult downstream_oracle(const SystemEvaluator& sys, const Box& domain,
                                   std::span<const double> x, std::span<const double> y,
                                   const std::vector<double>& eps_schedule, double spacing_ratio) {
    if (eps_schedule.empty()) throw std::invalid_argument("downstream_oracle: empty schedule");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]))
            throw std::invalid_argument("downstream_oracle: schedule must be strictly decreasing");

    DownstreamResult out;
    // the paper's definition is reflexive: y = x is downstream outright
    if (dist2(x, y) == 0.0) {
        out.verdict = DownstreamVerdict::downstream;
        for (double e : eps_schedule) out.per_eps.push_back({e, true});
        return out;
    }
    for (double eps : eps_schedule) {
        PointCloud cloud(sys, domain, eps / spacing_ratio);
        out.per_eps.push_back({eps, cloud.epsilon_chain_exists(x, y, eps)});
    }
    bool all = true, last = out.per_eps.back().second;
    for (auto& [e, ok] : out.per_eps) all = all && ok;
    if (all)
        out.verdict = DownstreamVerdict::downstream;
    else if (!last) {
        // monotone failure pattern (true at large eps, false below a cutoff)
        bool seen_false = false, monotone = true;
        for (auto& [e, ok] : out.per_eps) {
            if (!ok) seen_false = true;
            if (ok && seen_false) monotone = false;
        }
        out.verdict = monotone ? DownstreamVerdict::not_downstream : DownstreamVerdict::inconclusive;
    } else {
        out.verdict = DownstreamVerdict::inconclusive;
    }
    return out;
}

LimitSetEstimate omega_limit(const SystemEvaluator& sys, std::span<const double> x, int burn_in,
                             int samples, const Grid& grid) {
    if (samples < 1) throw std::invalid_argument("omega_limit: samples must be >= 1");
    LimitSetEstimate est;
    est.kind = LimitSetEstimate::Kind::omega;
    est.burn_in = burn_in;
    est.samples = samples;
    StateVec y{x};
    for (int i = 0; i < burn_in; ++i) {
        EvalResult r = sys.step(y.span());
        if (!r.ok()) throw std::runtime_error("omega_limit: trajectory escaped at step " + std::to_string(i));
        y = r.y;
    }
    for (int i = 0; i < samples; ++i) {
        EvalResult r = sys.step(y.span());
        if (!r.ok())
            throw std::runtime_error("omega_limit: trajectory escaped at step " +
                                     std::to_string(burn_in + i));
        y = r.y;
        est.points.push_back(y.to_vector());
        auto idx = grid.box_of(y.span());
        if (idx) est.boxes.push_back(*idx);
    }
    std::sort(est.boxes.begin(), est.boxes.end());
    est.boxes.erase(std::unique(est.boxes.begin(), est.boxes.end()), est.boxes.end());
    return est;
}

std::vector<box_index> alpha_reachability(const BoxMap& m, const std::vector<box_index>& attractor,
                                          box_index target) {
    if (!std::binary_search(attractor.begin(), attractor.end(), target))
        throw std::invalid_argument("alpha_reachability: target outside the attractor box set");
    // reversed-map BFS restricted to the attractor
    std::unordered_set<box_index> inside(attractor.begin(), attractor.end());
    std::unordered_set<box_index> reached = {target};
    // build reverse edges restricted to the attractor once
    std::unordered_map<box_index, std::vector<box_index>> rev;
    for (box_index b : attractor) {
        auto local = m.local_id(b);
        if (!local || m.is_escaped(b)) continue;
        for (box_index s : m.succs(*local))
            if (inside.count(s)) rev[s].push_back(b);
    }
    std::queue<box_index> q;
    q.push(target);
    while (!q.empty()) {
        box_index b = q.front();
        q.pop();
        auto it = rev.find(b);
        if (it == rev.end()) continue;
        for (box_index p : it->second)
            if (reached.insert(p).second) q.push(p);
    }
    std::vector<box_index> out(reached.begin(), reached.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// collar: attractor boxes within a Chebyshev-1 ring of the node's boxes,
// excluding the node itself and all other nodes
std::vector<box_index> unstable_collar(const BoxMap& m, const std::vector<box_index>& attractor,
                                       const Node& a, const std::vector<Node>& all_nodes) {
    std::unordered_set<box_index> in_node;
    for (const Node& n : all_nodes) in_node.insert(n.boxes.begin(), n.boxes.end());
    const Grid& g = m.grid;
    std::unordered_set<box_index> collar;
    std::vector<std::uint64_t> cc;
    for (box_index b : a.boxes) {
        auto base = g.coords_of(b);
        std::vector<std::int64_t> off(g.dim(), -1);
        while (true) {
            bool valid = true;
            cc.assign(g.dim(), 0);
            for (int d = 0; d < g.dim() && valid; ++d) {
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
            if (valid) {
                box_index nb = g.index_of(cc);
                if (!in_node.count(nb)) collar.insert(nb);
            }
            int d = g.dim() - 1;
            while (d >= 0) {
                if (++off[d] <= 1) break;
                off[d] = -1;
                --d;
            }
            if (d < 0) break;
        }
    }
    std::vector<box_index> out(collar.begin(), collar.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

EdgeStrengthResult classify_edge(const BoxMap& m, const std::vector<box_index>& attractor,
                                 const Node& a, const Node& b, const std::vector<Node>& all_nodes,
                                 const SystemEvaluator& sys, const ClassifyBudget& budget,
                                 std::uint64_t seed) {
    EdgeStrengthResult out;
    auto collar = unstable_collar(m, attractor, a, all_nodes);
    if (collar.empty()) return out;

    const Grid& g = m.grid;

    // Backward reachability from the seed box inside the attractor, stopped
    // at node boxes: a backward history must emanate from some recurrent set,
    // and the stopped search finds exactly the nearest upstream nodes. Plain
    // alpha_reachability would also report nodes whose chains merely pass
    // THROUGH A on the way to the seed.
    std::unordered_map<box_index, std::vector<box_index>> rev;
    {
        std::unordered_set<box_index> inside(attractor.begin(), attractor.end());
        for (box_index b : attractor) {
            auto local = m.local_id(b);
            if (!local || m.is_escaped(b)) continue;
            for (box_index s : m.succs(*local))
                if (inside.count(s)) rev[s].push_back(b);
        }
    }
    std::unordered_map<box_index, int> node_of_box;
    for (const Node& n : all_nodes)
        for (box_index b : n.boxes) node_of_box[b] = n.id;

    std::unordered_map<box_index, bool> alpha_ok;
    auto alpha_only_a = [&](box_index seed_box) {
        auto it = alpha_ok.find(seed_box);
        if (it != alpha_ok.end()) return it->second;
        bool meets_a = false, meets_other = false;
        if (std::binary_search(attractor.begin(), attractor.end(), seed_box)) {
            std::unordered_set<box_index> seen = {seed_box};
            std::queue<box_index> q;
            q.push(seed_box);
            while (!q.empty() && !meets_other) {
                box_index b = q.front();
                q.pop();
                auto rit = rev.find(b);
                if (rit == rev.end()) continue;
                for (box_index p : rit->second) {
                    if (!seen.insert(p).second) continue;
                    auto nit = node_of_box.find(p);
                    if (nit != node_of_box.end()) {
                        // record which node feeds the history, don't traverse past it
                        (nit->second == a.id ? meets_a : meets_other) = true;
                    } else {
                        q.push(p);
                    }
                }
            }
        }
        bool ok = meets_a && !meets_other;
        alpha_ok[seed_box] = ok;
        return ok;
    };

    SplitMix rng(seed);
    for (int s = 0; s < budget.seeds; ++s) {
        ++out.seeds_tried;
        box_index sb = collar[rng.next_below(collar.size())];
        Box cell = g.cell_bounds(sb);
        std::vector<double> p(g.dim());
        for (int d = 0; d < g.dim(); ++d) p[d] = rng.uniform(cell.lo[d], cell.hi[d]);

        std::vector<std::vector<double>> traj = {p};
        StateVec y{std::span<const double>(p)};
        bool escaped = false;
        int stable_in_b = 0;
        for (int it = 0; it < budget.iterations; ++it) {
            EvalResult r = sys.step(y.span());
            if (!r.ok()) {
                escaped = true;
                break;
            }
            double moved = dist2(r.y.span(), y.span());
            y = r.y;
            if (traj.size() < 1000) traj.push_back(y.to_vector());
            auto idx = g.box_of(y.span());
            bool in_b = idx && std::binary_search(b.boxes.begin(), b.boxes.end(), *idx);
            if (in_b)
                ++stable_in_b;
            else
                stable_in_b = 0;
            // converged inside B, or converged somewhere else (hopeless seed)
            if (stable_in_b >= 20) break;
            if (moved < 1e-13 && !in_b) {
                stable_in_b = -1;
                break;
            }
        }
        if (escaped || stable_in_b < 20) continue;
        if (!alpha_only_a(sb)) continue;
        out.label = EdgeStrength::strong;
        out.witness = std::move(traj);
        return out;
    }
    return out;
}

bool perturbed_flow_chain(const SystemEvaluator& sys, std::span<const double> x,
                          std::span<const double> y, double eps, double lipschitz, double T) {
    if (!sys.spec().is_flow()) throw std::invalid_argument("perturbed_flow_chain: flow kinds only");
    const int dim = static_cast<int>(x.size());
    const double budget = eps * std::exp(-std::min(lipschitz, 700.0));
    StateVec z{x};
    double t = 0;
    const double unit = 1.0;
    while (t < T + 1e-12) {
        if (dist2(z.span(), y) < eps) return true;
        EvalResult r = sys.flow(z.span(), unit);
        if (!r.ok()) return false;
        z = r.y;
        // instantaneous correction toward y, magnitude <= eps * exp(-L)
        double gap = dist2(z.span(), y);
        if (gap > 0) {
            double scale = std::min(budget, gap) / gap;
            for (int d = 0; d < dim; ++d) z[d] += scale * (y[d] - z[d]);
        }
        t += unit;
    }
    return dist2(z.span(), y) < eps;
}

ChainPointKind chain_point_kind(const SystemEvaluator& sys, const Box& domain,
                                std::span<const double> x, std::span<const double> y,
                                const std::vector<double>& eps_schedule, double spacing_ratio) {
    auto down = downstream_oracle(sys, domain, x, y, eps_schedule, spacing_ratio);
    if (down.verdict != DownstreamVerdict::downstream)
        throw std::invalid_argument("chain_point_kind: y is not downstream from x");

    std::vector<int> lengths;
    std::vector<bool> loops;
    for (double eps : eps_schedule) {
        PointCloud cloud(sys, domain, eps / spacing_ratio);
        auto len = cloud.min_chain_length(x, y, eps);
        if (!len) return ChainPointKind::neither;
        lengths.push_back(*len);
        // loopability of y: an eps-chain from y back to itself (k >= 2)
        loops.push_back(cloud.epsilon_chain_exists(y, y, eps));
    }
    bool bounded = lengths.back() <= lengths.front() + 2;
    bool growing = true;
    for (std::size_t i = 1; i < lengths.size(); ++i)
        if (lengths[i] < lengths[i - 1]) growing = false;
    growing = growing && lengths.back() > lengths.front();
    bool loopable = std::all_of(loops.begin(), loops.end(), [](bool b) { return b; });

    if (bounded && loopable) return ChainPointKind::both;
    if (bounded) return ChainPointKind::trajectory;
    if (growing) return ChainPointKind::limit;
    return ChainPointKind::neither;
}

}  // namespace chaingraph
