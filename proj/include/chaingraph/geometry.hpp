#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace chaingraph {

using box_index = std::uint64_t;

/// Axis-aligned box. Invariant: lo[i] < hi[i] for every dimension.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_);

    int dim() const { return static_cast<int>(lo.size()); }
    std::vector<double> center() const;
    std::vector<double> widths() const;
    double width(int d) const { return hi[d] - lo[d]; }
    bool contains(std::span<const double> p) const;
    double diameter() const;  // diagonal length
};

/// Uniform grid obtained by binary subdivision of a bounding box:
/// 2^depth[d] cells along dimension d, linear indices row-major with the
/// last dimension varying fastest. Periodic dimensions identify lo with hi.
/// Immutable after construction.
class Grid {
public:
    Grid() = default;
    Grid(Box bounds, std::vector<int> depth, std::vector<bool> periodic = {});

    const Box& bounds() const { return bounds_; }
    const std::vector<int>& depth() const { return depth_; }
    const std::vector<bool>& periodic() const { return periodic_; }
    int dim() const { return bounds_.dim(); }
    box_index box_count() const { return count_; }
    std::uint64_t cells(int d) const { return cells_[d]; }
    double cell_width(int d) const { return bounds_.width(d) / static_cast<double>(cells_[d]); }
    double min_cell_width() const;
    double max_cell_width() const;

    /// Cell containing a point, or nullopt when the point leaves non-periodic
    /// bounds. Points exactly on an internal cell boundary belong to the cell
    /// of smaller index; periodic coordinates are wrapped before lookup.
    std::optional<box_index> box_of(std::span<const double> p) const;

    Box cell_bounds(box_index idx) const;
    std::vector<std::uint64_t> coords_of(box_index idx) const;
    box_index index_of(std::span<const std::uint64_t> c) const;

private:
    Box bounds_;
    std::vector<int> depth_;
    std::vector<bool> periodic_;
    std::vector<std::uint64_t> cells_;
    box_index count_ = 0;
};

/// New grid with depth incremented on each listed dimension.
Grid subdivide(const Grid& g, const std::vector<int>& dims);

/// Children of a parent cell in a refined grid (child depth >= parent depth
/// in every dimension). Sorted.
std::vector<box_index> child_boxes(const Grid& parent, const Grid& child, box_index parent_idx);

/// Parent cell of a child-grid cell.
box_index parent_box(const Grid& parent, const Grid& child, box_index child_idx);

/// Euclidean distance between two cells as point sets (0 if the closures
/// intersect), respecting periodic dimensions.
double cell_distance(const Grid& g, box_index a, box_index b);

/// Symmetric min distance between two box unions: min over pairs of
/// cell_distance. Zero iff the closures intersect. Throws on empty input.
double set_distance(const std::vector<box_index>& a, const std::vector<box_index>& b, const Grid& g);

/// Min distance from a point to a box union.
double point_set_distance(std::span<const double> p, const std::vector<box_index>& boxes, const Grid& g);

/// Bounding box of a set of cells (no periodic unwrapping).
Box bounding_box(const std::vector<box_index>& boxes, const Grid& g);

/// Face-connected components of a box union (cells sharing a face are
/// neighbors; periodic dimensions wrap). Returns component id per input box.
std::vector<int> face_components(const std::vector<box_index>& boxes, const Grid& g);

}  // namespace chaingraph
