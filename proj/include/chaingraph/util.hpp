#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace chaingraph {

// Largest phase dimension we handle: 2N+1 Fourier coefficients with N <= 16.
inline constexpr int kMaxDim = 33;

/// Fixed-capacity state vector used in integrator hot loops (no heap churn).
struct StateVec {
    std::array<double, kMaxDim> v{};
    int n = 0;

    StateVec() = default;
    explicit StateVec(int size) : n(size) {}
    StateVec(std::span<const double> x) : n(static_cast<int>(x.size())) {
        for (int i = 0; i < n; ++i) v[i] = x[i];
    }

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
    int size() const { return n; }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    std::span<const double> span() const { return {v.data(), static_cast<size_t>(n)}; }
    std::vector<double> to_vector() const { return {v.data(), v.data() + n}; }
};

inline double norm2(std::span<const double> x) {
    double s = 0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// splitmix64; used to derive independent deterministic streams from
/// (seed, index) pairs so parallel sampling does not depend on scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        return mix64(state);
    }
    /// uniform in [0, 1)
    double next_double() { return (next() >> 11) * 0x1.0p-53; }
    /// uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }
    std::uint64_t next_below(std::uint64_t m) { return next() % m; }
};

inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CHAINGRAPH_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap > 0 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(hw);
}

/// Static block partition of [0, n); each index is processed exactly once and
/// writes only to its own slot, so results are schedule-independent.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace chaingraph
