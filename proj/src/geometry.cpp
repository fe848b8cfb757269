#include "chaingraph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "chaingraph/util.hpp"

namespace chaingraph {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi dimension mismatch");
    if (lo.empty()) throw std::invalid_argument("Box: zero dimension");
    for (size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: lo[i] < hi[i] required");
}

std::vector<double> Box::center() const {
    std::vector<double> c(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

std::vector<double> Box::widths() const {
    std::vector<double> w(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) w[i] = hi[i] - lo[i];
    return w;
}

bool Box::contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (size_t i = 0; i < lo.size(); ++i)
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
}

double Box::diameter() const {
    double s = 0;
    for (size_t i = 0; i < lo.size(); ++i) {
        double w = hi[i] - lo[i];
        s += w * w;
    }
    return std::sqrt(s);
}

Grid::Grid(Box bounds, std::vector<int> depth, std::vector<bool> periodic)
    : bounds_(std::move(bounds)), depth_(std::move(depth)), periodic_(std::move(periodic)) {
    if (static_cast<int>(depth_.size()) != bounds_.dim())
        throw std::invalid_argument("Grid: depth dimension mismatch");
    if (periodic_.empty()) periodic_.assign(bounds_.dim(), false);
    if (static_cast<int>(periodic_.size()) != bounds_.dim())
        throw std::invalid_argument("Grid: periodic dimension mismatch");
    cells_.resize(depth_.size());
    count_ = 1;
    for (size_t d = 0; d < depth_.size(); ++d) {
        if (depth_[d] < 0 || depth_[d] > 40) throw std::invalid_argument("Grid: depth out of range");
        cells_[d] = std::uint64_t(1) << depth_[d];
        count_ *= cells_[d];
    }
}

double Grid::min_cell_width() const {
    double w = cell_width(0);
    for (int d = 1; d < dim(); ++d) w = std::min(w, cell_width(d));
    return w;
}

double Grid::max_cell_width() const {
    double w = cell_width(0);
    for (int d = 1; d < dim(); ++d) w = std::max(w, cell_width(d));
    return w;
}

std::optional<box_index> Grid::box_of(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) throw std::invalid_argument("box_of: point dimension mismatch");
    box_index idx = 0;
    for (int d = 0; d < dim(); ++d) {
        double x = p[d];
        if (!std::isfinite(x)) throw std::invalid_argument("box_of: non-finite coordinate");
        const double lo = bounds_.lo[d], hi = bounds_.hi[d];
        const double span = hi - lo;
        if (periodic_[d]) {
            x = std::fmod(x - lo, span);
            if (x < 0) x += span;
            x += lo;
        } else if (x < lo || x > hi) {
            return std::nullopt;
        }
        const std::uint64_t n = cells_[d];
        double t = (x - lo) / span * static_cast<double>(n);
        // boundary points belong to the lower-index cell
        std::int64_t c = static_cast<std::int64_t>(std::ceil(t)) - 1;
        if (c < 0) c = 0;
        if (c >= static_cast<std::int64_t>(n)) c = static_cast<std::int64_t>(n) - 1;
        idx = idx * n + static_cast<std::uint64_t>(c);
    }
    return idx;
}

Box Grid::cell_bounds(box_index idx) const {
    if (idx >= count_) throw std::invalid_argument("cell_bounds: index out of range");
    auto c = coords_of(idx);
    std::vector<double> lo(dim()), hi(dim());
    for (int d = 0; d < dim(); ++d) {
        const double a = bounds_.lo[d], b = bounds_.hi[d];
        const double n = static_cast<double>(cells_[d]);
        lo[d] = a + (b - a) * (static_cast<double>(c[d]) / n);
        hi[d] = (c[d] + 1 == cells_[d]) ? b : a + (b - a) * (static_cast<double>(c[d] + 1) / n);
    }
    return Box(std::move(lo), std::move(hi));
}

std::vector<std::uint64_t> Grid::coords_of(box_index idx) const {
    std::vector<std::uint64_t> c(dim());
    for (int d = dim() - 1; d >= 0; --d) {
        c[d] = idx % cells_[d];
        idx /= cells_[d];
    }
    return c;
}

box_index Grid::index_of(std::span<const std::uint64_t> c) const {
    box_index idx = 0;
    for (int d = 0; d < dim(); ++d) idx = idx * cells_[d] + c[d];
    return idx;
}

Grid subdivide(const Grid& g, const std::vector<int>& dims) {
    if (dims.empty()) throw std::invalid_argument("subdivide: empty dimension set");
    auto depth = g.depth();
    for (int d : dims) {
        if (d < 0 || d >= g.dim()) throw std::invalid_argument("subdivide: dimension out of range");
        depth[d] += 1;
    }
    return Grid(g.bounds(), depth, g.periodic());
}

std::vector<box_index> child_boxes(const Grid& parent, const Grid& child, box_index parent_idx) {
    auto pc = parent.coords_of(parent_idx);
    std::vector<int> shift(parent.dim());
    for (int d = 0; d < parent.dim(); ++d) {
        shift[d] = child.depth()[d] - parent.depth()[d];
        if (shift[d] < 0) throw std::invalid_argument("child_boxes: child grid coarser than parent");
    }
    std::vector<box_index> out;
    std::vector<std::uint64_t> cc(parent.dim());
    // enumerate the 2^sum(shift) children in index order
    std::uint64_t total = 1;
    for (int d = 0; d < parent.dim(); ++d) total <<= shift[d];
    out.reserve(total);
    for (std::uint64_t k = 0; k < total; ++k) {
        std::uint64_t rem = k;
        for (int d = parent.dim() - 1; d >= 0; --d) {
            std::uint64_t m = std::uint64_t(1) << shift[d];
            cc[d] = (pc[d] << shift[d]) + (rem % m);
            rem /= m;
        }
        out.push_back(child.index_of(cc));
    }
    std::sort(out.begin(), out.end());
    return out;
}

box_index parent_box(const Grid& parent, const Grid& child, box_index child_idx) {
    auto cc = child.coords_of(child_idx);
    std::vector<std::uint64_t> pc(parent.dim());
    for (int d = 0; d < parent.dim(); ++d) {
        int shift = child.depth()[d] - parent.depth()[d];
        if (shift < 0) throw std::invalid_argument("parent_box: child grid coarser than parent");
        pc[d] = cc[d] >> shift;
    }
    return parent.index_of(pc);
}

namespace {

double interval_gap(double lo1, double hi1, double lo2, double hi2, bool periodic, double span) {
    double g = std::max({0.0, lo2 - hi1, lo1 - hi2});
    if (!periodic) return g;
    double gp = std::max({0.0, (lo2 + span) - hi1, lo1 - (hi2 + span)});
    double gm = std::max({0.0, (lo2 - span) - hi1, lo1 - (hi2 - span)});
    return std::min({g, gp, gm});
}

}  // namespace

double cell_distance(const Grid& g, box_index a, box_index b) {
    Box ba = g.cell_bounds(a), bb = g.cell_bounds(b);
    double s = 0;
    for (int d = 0; d < g.dim(); ++d) {
        double gap = interval_gap(ba.lo[d], ba.hi[d], bb.lo[d], bb.hi[d], g.periodic()[d], g.bounds().width(d));
        s += gap * gap;
    }
    return std::sqrt(s);
}

double set_distance(const std::vector<box_index>& a, const std::vector<box_index>& b, const Grid& g) {
    if (a.empty() || b.empty()) throw std::invalid_argument("set_distance: empty box set");
    double best = std::numeric_limits<double>::infinity();
    for (box_index ia : a) {
        Box ba = g.cell_bounds(ia);
        for (box_index ib : b) {
            Box bb = g.cell_bounds(ib);
            double s = 0;
            for (int d = 0; d < g.dim(); ++d) {
                double gap =
                    interval_gap(ba.lo[d], ba.hi[d], bb.lo[d], bb.hi[d], g.periodic()[d], g.bounds().width(d));
                s += gap * gap;
                if (s >= best * best) break;
            }
            best = std::min(best, std::sqrt(s));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

double point_set_distance(std::span<const double> p, const std::vector<box_index>& boxes, const Grid& g) {
    if (boxes.empty()) throw std::invalid_argument("point_set_distance: empty box set");
    double best = std::numeric_limits<double>::infinity();
    for (box_index ib : boxes) {
        Box bb = g.cell_bounds(ib);
        double s = 0;
        for (int d = 0; d < g.dim(); ++d) {
            double gap = interval_gap(p[d], p[d], bb.lo[d], bb.hi[d], g.periodic()[d], g.bounds().width(d));
            s += gap * gap;
        }
        best = std::min(best, std::sqrt(s));
        if (best == 0.0) return 0.0;
    }
    return best;
}

Box bounding_box(const std::vector<box_index>& boxes, const Grid& g) {
    if (boxes.empty()) throw std::invalid_argument("bounding_box: empty box set");
    Box acc = g.cell_bounds(boxes[0]);
    for (size_t i = 1; i < boxes.size(); ++i) {
        Box b = g.cell_bounds(boxes[i]);
        for (int d = 0; d < g.dim(); ++d) {
            acc.lo[d] = std::min(acc.lo[d], b.lo[d]);
            acc.hi[d] = std::max(acc.hi[d], b.hi[d]);
        }
    }
    return acc;
}

std::vector<int> face_components(const std::vector<box_index>& boxes, const Grid& g) {
    std::unordered_map<box_index, size_t> pos;
    pos.reserve(boxes.size() * 2);
    for (size_t i = 0; i < boxes.size(); ++i) pos[boxes[i]] = i;
    std::vector<int> comp(boxes.size(), -1);
    int next = 0;
    std::vector<std::uint64_t> cc;
    for (size_t s = 0; s < boxes.size(); ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        std::queue<size_t> q;
        q.push(s);
        while (!q.empty()) {
            size_t i = q.front();
            q.pop();
            cc = g.coords_of(boxes[i]);
            for (int d = 0; d < g.dim(); ++d) {
                for (int dir = -1; dir <= 1; dir += 2) {
                    std::int64_t c = static_cast<std::int64_t>(cc[d]) + dir;
                    std::uint64_t n = g.cells(d);
                    if (c < 0 || c >= static_cast<std::int64_t>(n)) {
                        if (!g.periodic()[d] || n == 1) continue;
                        c = (c + static_cast<std::int64_t>(n)) % static_cast<std::int64_t>(n);
                    }
                    std::uint64_t saved = cc[d];
                    cc[d] = static_cast<std::uint64_t>(c);
                    auto it = pos.find(g.index_of(cc));
                    cc[d] = saved;
                    if (it != pos.end() && comp[it->second] < 0) {
                        comp[it->second] = next;
                        q.push(it->second);
                    }
                }
            }
        }
        ++next;
    }
    return comp;
}

}  // namespace chaingraph
