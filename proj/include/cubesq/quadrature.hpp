// quadrature.hpp
//
// Globally adaptive 15-point Gauss-Kronrod integration for real or complex
// integrands, plus the counter-based random streams used by Monte Carlo.

#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <type_traits>
#include <vector>

#include "cubesq/core.hpp"

namespace cubesq {

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int max_panels = 4000;
    int min_panels = 1;  // initial uniform split; raise for oscillatory integrands
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0;
    int panels = 0;
    bool converged = false;
};

namespace gk {
inline constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                 0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes xk[1], xk[3], xk[5], xk[7].
inline constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> rule(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * wk[7];
    T gauss = fc * wg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * xk[i];
        const T s = f(c - dx) + f(c + dx);
        kron += s * wk[i];
        if (i % 2 == 1) gauss += s * wg[i / 2];
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}
}  // namespace gk

// Integrates f over [a, b]. f returns double or std::complex<double>.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    using T = std::decay_t<decltype(f(a))>;
    QuadResult<T> res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<gk::Panel<T>> heap;
    const int n0 = std::max(1, opt.min_panels);
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = i + 1 == n0 ? b : a + (b - a) * (i + 1) / n0;
        heap.push(gk::rule<T>(f, lo, hi));
    }
    auto totals = [&heap]() {
        auto copy = heap;
        T v{};
        double e = 0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair<T, double>{v, e};
    };
    T value{};
    double error = 0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= target) {
            res.converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= opt.max_panels) break;
        const gk::Panel<T> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const gk::Panel<T> left = gk::rule<T>(f, worst.a, mid);
        const gk::Panel<T> right = gk::rule<T>(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if (heap.size() % 64 == 0) {
            // Re-sum to keep incremental drift out of the stopping test.
            auto [v, e] = totals();
            value = v;
            error = e;
        }
    }
    auto [v, e] = totals();
    res.value = v;
    res.error = e;
    res.panels = static_cast<int>(heap.size());
    if (!res.converged) res.converged = e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(v));
    return res;
}

// SplitMix64 stream keyed by (seed, task). Draws depend only on the key and
// the draw index, never on thread scheduling.
class CounterRng {
public:
    CounterRng(u64 seed, u64 task) : state_(mix(seed ^ mix(task + 0x9E3779B97F4A7C15ull))) {}

    u64 next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n).
    u64 below(u64 n) { return static_cast<u64>((static_cast<u128>(next()) * n) >> 64); }

private:
    static u64 mix(u64 z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    u64 state_;
};

}  // namespace cubesq
