#include "chaingraph/systems.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace chaingraph {

namespace {

const double pi = 3.14159265358979323846;

// chafee-infante stencil sizes: coefficients c_{-N..N}, square d_{-2N..2N}
constexpr int kMaxModes = 16;

// Cubic term of the Galerkin projection by direct convolution in the complex
// basis: u^2 first (modes up to 2N), then (u^2)*u truncated back to N.
void chafee_rhs_impl(const double* y, int n_modes, double lambda, double* out) {
    const int N = n_modes;
    std::complex<double> c[2 * kMaxModes + 1];    // index k+N
    std::complex<double> d[4 * kMaxModes + 1];    // index m+2N
    auto C = [&](int k) -> std::complex<double>& { return c[k + N]; };
    auto D = [&](int m) -> std::complex<double>& { return d[m + 2 * N]; };

    C(0) = y[0];
    for (int k = 1; k <= N; ++k) {
        C(k) = std::complex<double>(0.5 * y[2 * k - 1], -0.5 * y[2 * k]);
        C(-k) = std::conj(C(k));
    }
    for (int m = -2 * N; m <= 2 * N; ++m) {
        std::complex<double> s = 0;
        int jlo = std::max(-N, m - N), jhi = std::min(N, m + N);
        for (int j = jlo; j <= jhi; ++j) s += C(j) * C(m - j);
        D(m) = s;
    }
    for (int k = 0; k <= N; ++k) {
        std::complex<double> cube = 0;
        for (int m = -2 * N; m <= 2 * N; ++m) {
            int j = k - m;
            if (j < -N || j > N) continue;
            cube += D(m) * C(j);
        }
        std::complex<double> dc = -double(k) * double(k) * C(k) + lambda * (C(k) - cube);
        if (k == 0) {
            out[0] = dc.real();
        } else {
            out[2 * k - 1] = 2.0 * dc.real();
            out[2 * k] = -2.0 * dc.imag();
        }
    }
}

}  // namespace

int SystemSpec::phase_dim() const {
    switch (kind) {
        case SystemKind::identity_map: return dim;
        case SystemKind::logistic_map: return 1;
        case SystemKind::polynomial_flow: return 1;
        case SystemKind::lorenz_flow: return mode == StepMode::poincare_return ? 2 : 3;
        case SystemKind::pendulum_poincare: return 2;
        case SystemKind::circle_rotation_flow: return 1;
        case SystemKind::sin_pi_over_x_flow: return 1;
        case SystemKind::chafee_infante_galerkin: return grid_modes > 0 ? grid_modes : 2 * modes + 1;
    }
    return 1;
}

bool SystemSpec::is_flow() const {
    switch (kind) {
        case SystemKind::identity_map:
        case SystemKind::logistic_map: return false;
        default: return true;
    }
}

void SystemSpec::validate() const {
    if (kind == SystemKind::logistic_map && !(a > 1.0 && a <= 4.0))
        throw std::invalid_argument("logistic parameter a must be in (1, 4]");
    if (kind == SystemKind::pendulum_poincare && !(gamma > 0))
        throw std::invalid_argument("pendulum damping gamma must be positive");
    if (kind == SystemKind::chafee_infante_galerkin) {
        if (!(lambda > 0)) throw std::invalid_argument("chafee-infante lambda must be positive");
        if (modes < 1 || modes > kMaxModes) throw std::invalid_argument("chafee-infante modes out of range");
        if (grid_modes < 0 || grid_modes > 2 * modes + 1)
            throw std::invalid_argument("chafee-infante grid_modes out of range");
    }
    if (kind == SystemKind::polynomial_flow && poly_coeffs.empty())
        throw std::invalid_argument("polynomial flow needs coefficients");
    if (mode == StepMode::time_t_map) {
        if (!(time_step > 0)) throw std::invalid_argument("time-T map needs T > 0");
        if (!is_flow()) throw std::invalid_argument("time-T map requires a flow kind");
        if (integrator.dt > time_step) throw std::invalid_argument("integrator dt must not exceed T");
    }
    if (!(integrator.dt > 0)) throw std::invalid_argument("integrator dt must be positive");
    if (!(escape_radius > 0)) throw std::invalid_argument("escape radius must be positive");
    if (kind == SystemKind::identity_map && (dim < 1 || dim > kMaxDim))
        throw std::invalid_argument("identity map dimension out of range");
}

SystemEvaluator::SystemEvaluator(SystemSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    dim_ = spec_.phase_dim();
    switch (spec_.kind) {
        case SystemKind::lorenz_flow: state_dim_ = 3; break;
        case SystemKind::chafee_infante_galerkin: state_dim_ = 2 * spec_.modes + 1; break;
        default: state_dim_ = dim_; break;
    }
}

void SystemEvaluator::rhs(double t, const double* y, double* f) const {
    switch (spec_.kind) {
        case SystemKind::polynomial_flow: {
            double acc = 0, p = 1, x = y[0];
            for (double c : spec_.poly_coeffs) {
                acc += c * p;
                p *= x;
            }
            f[0] = acc;
            break;
        }
        case SystemKind::lorenz_flow:
            f[0] = spec_.sigma * (y[1] - y[0]);
            f[1] = y[0] * (spec_.r - y[2]) - y[1];
            f[2] = y[0] * y[1] - spec_.b * y[2];
            break;
        case SystemKind::pendulum_poincare:
            f[0] = y[1];
            f[1] = -spec_.gamma * y[1] - std::sin(y[0]) + spec_.rho * std::cos(t);
            break;
        case SystemKind::circle_rotation_flow:
            f[0] = 2 * pi;
            break;
        case SystemKind::sin_pi_over_x_flow:
            f[0] = (y[0] == 0.0) ? 0.0 : y[0] * std::sin(pi / y[0]);
            break;
        case SystemKind::chafee_infante_galerkin:
            chafee_rhs_impl(y, spec_.modes, spec_.lambda, f);
            break;
        default:
            throw std::logic_error("rhs called on a discrete map");
    }
}

void SystemEvaluator::vector_field(double t, std::span<const double> y, std::span<double> out) const {
    if (!spec_.is_flow()) throw std::invalid_argument("vector_field: not a flow");
    rhs(t, y.data(), out.data());
}

bool SystemEvaluator::inside_safety_ball(std::span<const double> y) const {
    if (spec_.kind == SystemKind::pendulum_poincare) return std::abs(y[1]) <= spec_.escape_radius;
    return norm2(y) <= spec_.escape_radius;
}

StateVec SystemEvaluator::embed(std::span<const double> x) const {
    StateVec y(state_dim_);
    if (spec_.kind == SystemKind::lorenz_flow && spec_.mode == StepMode::poincare_return) {
        y[0] = x[0];
        y[1] = x[1];
        y[spec_.section.axis] = spec_.section.value;
        // section plane must be an axis other than the two free coordinates
        if (spec_.section.axis != 2) throw std::invalid_argument("lorenz section must be a z-plane");
    } else if (spec_.kind == SystemKind::chafee_infante_galerkin && spec_.grid_modes > 0) {
        for (int i = 0; i < spec_.grid_modes; ++i) y[i] = x[i];
    } else {
        for (int i = 0; i < state_dim_; ++i) y[i] = x[i];
    }
    return y;
}

StateVec SystemEvaluator::project(const StateVec& y) const {
    if (static_cast<int>(dim_) == y.size()) return y;
    StateVec out(dim_);
    if (spec_.kind == SystemKind::lorenz_flow && spec_.mode == StepMode::poincare_return) {
        out[0] = y[0];
        out[1] = y[1];
    } else {
        for (int i = 0; i < dim_; ++i) out[i] = y[i];
    }
    return out;
}

EvalResult SystemEvaluator::integrate(const StateVec& y0, double t0, double T) const {
    const int n = y0.size();
    long steps = static_cast<long>(std::ceil(T / spec_.integrator.dt));
    if (steps < 1) steps = 1;
    const double h = T / static_cast<double>(steps);
    StateVec y = y0;
    double k1[kMaxDim], k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], tmp[kMaxDim];
    double t = t0;
    for (long s = 0; s < steps; ++s) {
        rhs(t, y.data(), k1);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (int i = 0; i < n; ++i) y[i] += (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t = t0 + (s + 1) * h;
        if (!inside_safety_ball(y.span()) || !std::isfinite(y[0])) return {EvalStatus::escaped, y};
    }
    return {EvalStatus::ok, y};
}

EvalResult SystemEvaluator::flow(std::span<const double> x, double T) const {
    if (!spec_.is_flow()) throw std::invalid_argument("flow: not a flow kind");
    if (!(T > 0)) throw std::invalid_argument("flow: T must be positive");
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::invalid_argument("flow: non-finite input");
    StateVec y0 = embed(x);
    EvalResult r = integrate(y0, 0.0, T);
    r.y = project(r.y);
    return r;
}

namespace {

// cubic Hermite interpolation of one RK4 step
void hermite(const double* y0, const double* f0, const double* y1, const double* f1, int n, double h,
             double theta, double* out) {
    double t2 = theta * theta, t3 = t2 * theta;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    for (int i = 0; i < n; ++i) out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
}

}  // namespace

EvalResult SystemEvaluator::section_return(const StateVec& x0) const {
    const int n = state_dim_;
    const int axis = spec_.section.axis;
    const double plane = spec_.section.value;
    const int dir = spec_.section.direction;
    const double h = spec_.integrator.dt;

    StateVec y = x0;
    double f_prev[kMaxDim], f_next[kMaxDim];
    double k2[kMaxDim], k3[kMaxDim], tmp[kMaxDim];
    rhs(0.0, y.data(), f_prev);
    double t = 0;
    double s_prev = y[axis] - plane;
    while (t < spec_.section.max_time) {
        StateVec ynew = y;
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * f_prev[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(t + h, tmp, f_next);
        for (int i = 0; i < n; ++i) ynew[i] = y[i] + (h / 6.0) * (f_prev[i] + 2 * k2[i] + 2 * k3[i] + f_next[i]);
        if (!inside_safety_ball(ynew.span()) || !std::isfinite(ynew[0])) return {EvalStatus::escaped, ynew};

        rhs(t + h, ynew.data(), f_next);  // derivative at the endpoint for dense output
        double s_new = ynew[axis] - plane;
        bool crossed = (dir >= 0 && s_prev < 0 && s_new >= 0) || (dir <= 0 && s_prev > 0 && s_new <= 0);
        if (crossed && s_prev != 0.0) {
            // bisection on the cubic Hermite interpolant
            double lo = 0, hi = 1, mid = 0.5;
            double out[kMaxDim];
            for (int it = 0; it < 80; ++it) {
                mid = 0.5 * (lo + hi);
                hermite(y.data(), f_prev, ynew.data(), f_next, n, h, mid, out);
                double s = out[axis] - plane;
                if (std::abs(s) < 1e-8) break;
                bool same_side_as_start = (s_prev > 0) == (s > 0);
                (same_side_as_start ? lo : hi) = mid;
            }
            hermite(y.data(), f_prev, ynew.data(), f_next, n, h, mid, out);
            StateVec res(n);
            for (int i = 0; i < n; ++i) res[i] = out[i];
            res[axis] = plane;  // section membership enforced exactly
            return {EvalStatus::ok, res};
        }
        y = ynew;
        s_prev = s_new;
        std::copy(f_next, f_next + n, f_prev);
        t += h;
    }
    return {EvalStatus::no_return, y};
}

EvalResult SystemEvaluator::poincare_return(std::span<const double> x) const {
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::invalid_argument("poincare_return: non-finite input");
    if (spec_.kind == SystemKind::pendulum_poincare) {
        // periodic forcing: one full period of the nonautonomous flow.
        // The map acts on the cylinder, so the angle is wrapped to [-pi, pi).
        EvalResult r = integrate(embed(x), 0.0, 2 * pi);
        double th = std::fmod(r.y[0] + pi, 2 * pi);
        if (th < 0) th += 2 * pi;
        r.y[0] = th - pi;
        return r;
    }
    if (spec_.kind != SystemKind::lorenz_flow)
        throw std::invalid_argument("poincare_return: unsupported system");
    EvalResult r = section_return(embed(x));
    r.y = project(r.y);
    return r;
}

EvalResult SystemEvaluator::step(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("step: dimension mismatch");
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::invalid_argument("step: non-finite input");
    switch (spec_.mode) {
        case StepMode::discrete_map: {
            StateVec y(dim_);
            switch (spec_.kind) {
                case SystemKind::identity_map:
                    for (int i = 0; i < dim_; ++i) y[i] = x[i];
                    return {EvalStatus::ok, y};
                case SystemKind::logistic_map: {
                    double v = spec_.a * x[0] * (1.0 - x[0]);
                    y[0] = v;
                    if (!std::isfinite(v) || std::abs(v) > spec_.escape_radius) return {EvalStatus::escaped, y};
                    return {EvalStatus::ok, y};
                }
                default: throw std::invalid_argument("step: kind is not a discrete map");
            }
        }
        case StepMode::time_t_map: return flow(x, spec_.time_step);
        case StepMode::poincare_return: return poincare_return(x);
    }
    return {EvalStatus::ok, StateVec(dim_)};
}

LogisticTrappingInterval logistic_trapping_interval(double a, double margin) {
    if (!(a > 1.0 && a <= 4.0)) throw std::invalid_argument("logistic_trapping_interval: a must be in (1, 4]");
    double hi = a / 4.0;
    double lo = (a * a / 4.0) * (1.0 - a / 4.0);
    bool degenerate = (hi - lo) < margin;
    if (degenerate) {
        lo = std::max(0.0, lo - margin);
        hi = std::min(1.0, hi + margin);
    }
    return {Box({lo}, {hi}), degenerate};
}

// --- Chafee-Infante helpers ------------------------------------------------

static int check_coeffs(std::span<const double> coeffs) {
    if (coeffs.size() % 2 == 0 || coeffs.empty())
        throw std::invalid_argument("coefficient vector must have odd length 2N+1");
    int n = static_cast<int>(coeffs.size() / 2);
    if (n > kMaxModes) throw std::invalid_argument("too many Fourier modes");
    return n;
}

std::vector<double> chafee_infante_rhs(std::span<const double> coeffs, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("chafee_infante_rhs: lambda must be positive");
    int n = check_coeffs(coeffs);
    if (n < 1) throw std::invalid_argument("chafee_infante_rhs: need N >= 1");
    std::vector<double> out(coeffs.size());
    chafee_rhs_impl(coeffs.data(), n, lambda, out.data());
    return out;
}

double lyapunov_v(std::span<const double> coeffs) {
    int n = check_coeffs(coeffs);
    double s = 0;
    for (int k = 1; k <= n; ++k) {
        double ak = coeffs[2 * k - 1], bk = coeffs[2 * k];
        s += double(k) * double(k) * (ak * ak + bk * bk);
    }
    return 0.5 * pi * s;
}

TrigSampler::TrigSampler(int n_modes, int samples) : n_(n_modes) {
    samples_ = samples > 0 ? samples : 64 * n_modes;
    table_.resize(static_cast<size_t>(samples_) * 2 * n_);
    for (int i = 0; i < samples_; ++i) {
        double x = 2 * pi * i / samples_;
        for (int k = 1; k <= n_; ++k) {
            table_[(static_cast<size_t>(i) * 2 * n_) + 2 * (k - 1)] = std::cos(k * x);
            table_[(static_cast<size_t>(i) * 2 * n_) + 2 * (k - 1) + 1] = std::sin(k * x);
        }
    }
}

double TrigSampler::max_u(std::span<const double> coeffs) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples_; ++i) {
        const double* row = table_.data() + static_cast<size_t>(i) * 2 * n_;
        double u = coeffs[0];
        for (int k = 1; k <= n_; ++k) u += coeffs[2 * k - 1] * row[2 * (k - 1)] + coeffs[2 * k] * row[2 * (k - 1) + 1];
        best = std::max(best, u);
    }
    return best;
}

double TrigSampler::min_u(std::span<const double> coeffs) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples_; ++i) {
        const double* row = table_.data() + static_cast<size_t>(i) * 2 * n_;
        double u = coeffs[0];
        for (int k = 1; k <= n_; ++k) u += coeffs[2 * k - 1] * row[2 * (k - 1)] + coeffs[2 * k] * row[2 * (k - 1) + 1];
        best = std::min(best, u);
    }
    return best;
}

double lyapunov_w1(std::span<const double> coeffs, int samples) {
    int n = check_coeffs(coeffs);
    if (n == 0) return coeffs[0];
    TrigSampler s(n, samples);
    return s.max_u(coeffs);
}

double lyapunov_w2(std::span<const double> coeffs, int samples) {
    int n = check_coeffs(coeffs);
    if (n == 0) return -coeffs[0];
    TrigSampler s(n, samples);
    return -s.min_u(coeffs);
}

std::pair<double, double> poincare_inequality_check(std::span<const double> coeffs) {
    int n = check_coeffs(coeffs);
    double s1 = 0, s2 = 0;
    for (int k = 1; k <= n; ++k) {
        double k2 = double(k) * double(k);
        double e = coeffs[2 * k - 1] * coeffs[2 * k - 1] + coeffs[2 * k] * coeffs[2 * k];
        s1 += k2 * e;
        s2 += k2 * k2 * e;
    }
    return {std::sqrt(pi * s1), std::sqrt(pi * s2)};
}

std::pair<double, double> poincare_mean_inequality_check(std::span<const double> coeffs) {
    int n = check_coeffs(coeffs);
    double s0 = 0, s1 = 0;
    for (int k = 1; k <= n; ++k) {
        double e = coeffs[2 * k - 1] * coeffs[2 * k - 1] + coeffs[2 * k] * coeffs[2 * k];
        s0 += e;
        s1 += double(k) * double(k) * e;
    }
    return {std::sqrt(pi * s0), std::sqrt(pi * s1)};
}

double estimate_lipschitz(const SystemEvaluator& sys, const Box& region, int samples, std::uint64_t seed) {
    SplitMix rng(seed);
    int d = region.dim();
    double best = 0;
    std::vector<double> p(d), q(d), fp(d), fq(d);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < d; ++i) {
            p[i] = rng.uniform(region.lo[i], region.hi[i]);
            q[i] = rng.uniform(region.lo[i], region.hi[i]);
        }
        double dd = dist2(p, q);
        if (dd < 1e-12) continue;
        sys.vector_field(0.0, p, fp);
        sys.vector_field(0.0, q, fq);
        best = std::max(best, dist2(fp, fq) / dd);
    }
    return best;
}

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::identity_map: return "identity";
        case SystemKind::logistic_map: return "logistic";
        case SystemKind::polynomial_flow: return "polynomial-flow";
        case SystemKind::lorenz_flow: return "lorenz";
        case SystemKind::pendulum_poincare: return "pendulum";
        case SystemKind::circle_rotation_flow: return "circle-rotation";
        case SystemKind::sin_pi_over_x_flow: return "sin-pi-over-x";
        case SystemKind::chafee_infante_galerkin: return "chafee-infante";
    }
    return "?";
}

std::string to_string(StepMode m) {
    switch (m) {
        case StepMode::discrete_map: return "map";
        case StepMode::time_t_map: return "time-t";
        case StepMode::poincare_return: return "poincare";
    }
    return "?";
}

}  // namespace chaingraph
