#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chaingraph/geometry.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

enum class SystemKind {
    identity_map,
    logistic_map,
    polynomial_flow,
    lorenz_flow,
    pendulum_poincare,
    circle_rotation_flow,
    sin_pi_over_x_flow,
    chafee_infante_galerkin,
};

enum class StepMode { discrete_map, time_t_map, poincare_return };

/// Cross-section for Poincare return maps: the plane state[axis] = value,
/// crossed in the given direction (+1 rising, -1 falling, 0 either).
struct SectionConfig {
    int axis = 2;
    double value = 16.5;
    int direction = -1;
    double max_time = 400.0;
};

struct IntegratorConfig {
    double dt = 0.005;  // RK4 step upper bound; actual step is T/ceil(T/dt)
};

/// Declarative description of one dynamical system run.
struct SystemSpec {
    SystemKind kind = SystemKind::identity_map;
    StepMode mode = StepMode::discrete_map;
    double time_step = 1.0;  // T of the time-T map
    SectionConfig section;
    IntegratorConfig integrator;
    double escape_radius = 1e6;

    double a = 4.0;                              // logistic
    double sigma = 10.0, b = 8.0 / 3.0, r = 28;  // lorenz
    double gamma = 0.2, rho = 2.0;               // pendulum
    double lambda = 0.5;                         // chafee-infante
    int modes = 8;                               // chafee-infante Fourier truncation N
    int grid_modes = 0;  // >0: box analysis runs on the leading grid_modes coefficients
    std::vector<double> poly_coeffs = {0.0, 1.0, 0.0, -1.0};  // dx/dt = sum c_k x^k
    int dim = 1;                                 // identity map dimension

    int phase_dim() const;
    bool is_flow() const;
    void validate() const;  // throws std::invalid_argument
};

enum class EvalStatus { ok, escaped, no_return };

struct EvalResult {
    EvalStatus status = EvalStatus::ok;
    StateVec y;
    bool ok() const { return status == EvalStatus::ok; }
};

/// One-step evaluator. Pure: no mutable state, safe to call concurrently.
class SystemEvaluator {
public:
    explicit SystemEvaluator(SystemSpec spec);

    const SystemSpec& spec() const { return spec_; }
    int dim() const { return dim_; }

    /// One discrete step: the map itself, the time-T flow map, or the next
    /// section crossing, per spec().mode.
    EvalResult step(std::span<const double> x) const;

    /// Time-T flow map (flow kinds only). For the periodically forced
    /// pendulum the integration starts at forcing phase t = 0.
    EvalResult flow(std::span<const double> x, double T) const;

    /// Next directed crossing of the configured section (Lorenz-style), or
    /// the time-2*pi map for the periodically forced pendulum.
    EvalResult poincare_return(std::span<const double> x) const;

    /// Vector field at time t (flow kinds only; maps throw).
    void vector_field(double t, std::span<const double> y, std::span<double> out) const;

    bool inside_safety_ball(std::span<const double> y) const;

private:
    EvalResult integrate(const StateVec& y0, double t0, double T) const;
    EvalResult section_return(const StateVec& x) const;
    void rhs(double t, const double* y, double* f) const;
    StateVec embed(std::span<const double> x) const;
    StateVec project(const StateVec& y) const;

    SystemSpec spec_;
    int dim_;        // grid-facing dimension
    int state_dim_;  // internal integration dimension
};

/// Trapping interval [a^2/4 (1 - a/4), a/4] of the logistic map; degenerate
/// widths (a near 2) are widened by `margin` and flagged.
struct LogisticTrappingInterval {
    Box interval;
    bool degenerate;
};
LogisticTrappingInterval logistic_trapping_interval(double a, double margin = 0.05);

// --- Chafee-Infante Galerkin helpers -------------------------------------
// Real Fourier layout on the 2*pi circle: [a0, a1, b1, ..., aN, bN] for
// u(x) = a0 + sum_k (a_k cos kx + b_k sin kx).

/// d(coeffs)/dt for u_t = u_xx + lambda*u*(1-u^2) projected on modes <= N.
std::vector<double> chafee_infante_rhs(std::span<const double> coeffs, double lambda);

/// V(u) = 1/2 ||u_x||^2_{L2(S1)}, exact via Parseval.
double lyapunov_v(std::span<const double> coeffs);

/// max_x u(x) / max_x -u(x) by dense sampling (>= 64*N points); the sampled
/// max slightly under-approximates the true max.
double lyapunov_w1(std::span<const double> coeffs, int samples = 0);
double lyapunov_w2(std::span<const double> coeffs, int samples = 0);

/// (||u_x||, ||u_xx||) on L2(S1) via Parseval; lhs <= rhs always.
std::pair<double, double> poincare_inequality_check(std::span<const double> coeffs);

/// (||v - mean||, ||v_x||) on L2(S1); lhs <= rhs always.
std::pair<double, double> poincare_mean_inequality_check(std::span<const double> coeffs);

/// Cached trig table for repeated W1/W2 evaluations along a trajectory.
class TrigSampler {
public:
    TrigSampler(int n_modes, int samples = 0);
    double max_u(std::span<const double> coeffs) const;
    double min_u(std::span<const double> coeffs) const;

private:
    int n_;
    int samples_;
    std::vector<double> table_;  // samples x (2n) [cos kx, sin kx]
};

/// Empirical Lipschitz bound of the vector field on a box, from sampled pairs.
double estimate_lipschitz(const SystemEvaluator& sys, const Box& region, int samples, std::uint64_t seed);

std::string to_string(SystemKind k);
std::string to_string(StepMode m);

}  // namespace chaingraph
