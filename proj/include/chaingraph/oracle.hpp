#pragma once

#include <optional>
#include <vector>

#include "chaingraph/boxmap.hpp"
#include "chaingraph/systems.hpp"

namespace chaingraph {

/// Uniform lattice over a compact box K, with the system's image of every
/// lattice point precomputed. Ground truth for epsilon-chain reachability;
/// independent of the box-map pipeline.
class PointCloud {
public:
    PointCloud(const SystemEvaluator& sys, const Box& domain, double spacing,
               std::size_t max_points = 2'000'000);

    double spacing() const { return spacing_; }
    const Box& domain() const { return domain_; }
    std::size_t size() const { return count_; }
    std::vector<double> point(std::size_t i) const;
    std::size_t snap(std::span<const double> p) const;  // nearest lattice point

    /// BFS reachability over the relation p -> q iff d(F(p), q) < eps;
    /// returns true when a chain of length >= 2 from x to y exists.
    bool epsilon_chain_exists(std::span<const double> x, std::span<const double> y, double eps) const;

    /// minimal chain length (number of points, >= 2) or nullopt
    std::optional<int> min_chain_length(std::span<const double> x, std::span<const double> y,
                                        double eps) const;

private:
    void bfs(std::size_t start, double eps, std::vector<std::int32_t>& dist) const;

    Box domain_;
    double spacing_;
    int dim_;
    std::vector<std::size_t> lattice_dims_;
    std::size_t count_ = 0;
    std::vector<double> images_;     // count x dim, NaN for escaped evaluations
    std::vector<char> image_ok_;
};

enum class DownstreamVerdict { downstream, not_downstream, inconclusive };

struct DownstreamResult {
    DownstreamVerdict verdict = DownstreamVerdict::inconclusive;
    std::vector<std::pair<double, bool>> per_eps;  // (eps, chain found)
};

/// Runs epsilon_chain_exists over a strictly decreasing eps schedule, with the
/// lattice spacing refined proportionally (spacing = eps / spacing_ratio).
/// Downstream if true at every eps; NotDownstream if false at the smallest;
/// Inconclusive on non-monotone outcomes. y == x short-circuits to Downstream.
DownstreamResult downstream_oracle(const SystemEvaluator& sys, const Box& domain,
                                   std::span<const double> x, std::span<const double> y,
                                   const std::vector<double>& eps_schedule, double spacing_ratio = 5.0);

struct LimitSetEstimate {
    enum class Kind { omega, alpha };
    Kind kind = Kind::omega;
    std::vector<std::vector<double>> points;
    std::vector<box_index> boxes;  // clustered at the analysis grid
    int burn_in = 0;
    int samples = 0;
};

/// Forward limit set estimate: iterate burn_in steps, record `samples` more,
/// cluster into grid cells. Throws std::runtime_error on escape.
LimitSetEstimate omega_limit(const SystemEvaluator& sys, std::span<const double> x, int burn_in,
                             int samples, const Grid& grid);

/// Attractor boxes from which `target` is forward-reachable (the backward
/// reachable set of target under the reversed map restricted to the
/// attractor); combinatorial stand-in for alpha-limit support.
std::vector<box_index> alpha_reachability(const BoxMap& m, const std::vector<box_index>& attractor,
                                          box_index target);

struct ClassifyBudget {
    int seeds = 100;
    int iterations = 1000;
};

struct EdgeStrengthResult {
    EdgeStrength label = EdgeStrength::weak_candidate;
    std::vector<std::vector<double>> witness;  // decimated trajectory for strong edges
    int seeds_tried = 0;
    // WeakCandidate means no witness found under budget, NOT a proof of
    // weakness.
};

/// Search for a strong-edge witness from A to B: seed in the one-box collar
/// around A, iterate forward, require the omega estimate inside B and the
/// seed's alpha-reachability meeting only A among nodes.
EdgeStrengthResult classify_edge(const BoxMap& m, const std::vector<box_index>& attractor,
                                 const Node& a, const Node& b, const std::vector<Node>& all_nodes,
                                 const SystemEvaluator& sys, const ClassifyBudget& budget,
                                 std::uint64_t seed = 1);

/// Greedy steered integration: once per unit time, an instantaneous
/// correction of magnitude <= eps * exp(-lipschitz) is applied toward y.
/// Returns whether y is reached (within eps) by time T.
bool perturbed_flow_chain(const SystemEvaluator& sys, std::span<const double> x,
                          std::span<const double> y, double eps, double lipschitz, double T);

enum class ChainPointKind { limit, trajectory, both, neither };

/// Heuristic classification of how y is downstream from x: by the trend of
/// minimal chain lengths across the eps schedule and by loopability of y.
ChainPointKind chain_point_kind(const SystemEvaluator& sys, const Box& domain,
                                std::span<const double> x, std::span<const double> y,
                                const std::vector<double>& eps_schedule, double spacing_ratio = 5.0);

}  // namespace chaingraph
