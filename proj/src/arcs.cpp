#include "cubesq/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fftw3.h>
#include <json.hpp>

#include "cubesq/local_densities.hpp"
#include "cubesq/numtheory.hpp"
#include "cubesq/quadrature.hpp"

namespace cubesq {

namespace {

u128 square(u64 x) { return static_cast<u128>(x) * x; }

u64 p_sixth(u64 p) {
    const u128 v = square(p) * p * p * p * p;
    if (v >> 63) throw CapacityError("p^6 exceeds 63 bits");
    return static_cast<u64>(v);
}

// Panels needed to resolve a phase that moves by `cycles` full turns.
int panels_for(double cycles) { return 1 + static_cast<int>(std::ceil(0.5 * std::abs(cycles))); }

}  // namespace

// --- generating functions ---------------------------------------------------------

cplx eval_h(double alpha, const WeightTable& table) {
    if (table.role != Role::a) throw ContractError("eval_h: table must have role a");
    KahanSum acc;
    for (std::size_t i = 0; i < table.size(); ++i) {
        acc.add(static_cast<double>(table.multiplicity[i]) * expi(frac_mul(alpha, square(table.support[i]))));
    }
    return acc.value();
}

cplx eval_W(double alpha, const WeightTable& table, std::span<const u64> primes, bool allow_empty) {
    if (table.role != Role::b) throw ContractError("eval_W: table must have role b");
    if (primes.empty()) {
        if (!allow_empty) throw DegenerateError("eval_W: degenerate prime range (no prime in [M/2, M])");
        return {0.0, 0.0};
    }
    KahanSum acc;
    for (u64 p : primes) {
        const u128 p6 = p_sixth(p);
        for (std::size_t i = 0; i < table.size(); ++i) {
            acc.add(static_cast<double>(table.multiplicity[i]) * expi(frac_mul(alpha, p6 * square(table.support[i]))));
        }
    }
    return acc.value();
}

// --- arcs ---------------------------------------------------------------------------

ArcDissection major_arcs(const Params& prm, double n) {
    return {std::pow(static_cast<double>(prm.P), 0.8), n, kTau};
}

ArcDissection narrow_arcs(const Params& prm, double n) {
    return {std::pow(std::log(static_cast<double>(prm.P)), kTau), n, kTau};
}

namespace {

bool better(const ArcHit& cand, double dist, const ArcHit& best, double best_dist) {
    if (!best.major) return true;
    if (cand.q != best.q) return cand.q < best.q;
    return dist < best_dist;
}

}  // namespace

ArcHit classify_scan(double alpha, const ArcDissection& d) {
    const u64 qmax = d.X >= 1.0 ? static_cast<u64>(std::floor(d.X)) : 0;
    for (u64 q = 1; q <= qmax; ++q) {
        const double w = d.half_width(q);
        const double qd = static_cast<double>(q);
        const double lo_f = std::max(0.0, std::floor((alpha - w) * qd) - 1.0);
        const double hi_f = std::min(qd, std::ceil((alpha + w) * qd) + 1.0);
        ArcHit best;
        double best_dist = 0;
        for (auto a = static_cast<i64>(lo_f); a <= static_cast<i64>(hi_f); ++a) {
            if (std::gcd(static_cast<u64>(a), q) != 1) continue;
            const double dist = std::abs(alpha - static_cast<double>(a) / qd);
            if (dist > w) continue;
            ArcHit h{true, a, q, alpha - static_cast<double>(a) / qd};
            if (better(h, dist, best, best_dist)) {
                best = h;
                best_dist = dist;
            }
        }
        if (best.major) return best;
    }
    return {};
}

ArcHit classify(double alpha, const ArcDissection& d) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ContractError("classify: alpha must lie in [0, 1)");
    if (!(2.0 * d.X * d.X < d.n)) return classify_scan(alpha, d);

    // alpha = num / 2^shift exactly.
    int exp2 = 0;
    const double mant = std::frexp(alpha, &exp2);
    const auto num53 = static_cast<u64>(std::ldexp(mant, 53));
    const int shift = 53 - exp2;
    u128 num = 0, den = 1;
    if (alpha > 0.0 && shift <= 120) {
        num = num53;
        den = static_cast<u128>(1) << shift;
    }

    ArcHit best;
    double best_dist = 0;
    auto consider = [&](u128 a, u128 q) {
        if (q == 0 || static_cast<double>(q) > d.X) return;
        const u64 qq = static_cast<u64>(q);
        const double dist = std::abs(alpha - static_cast<double>(a) / static_cast<double>(qq));
        if (dist > d.half_width(qq)) return;
        ArcHit h{true, static_cast<i64>(a), qq, alpha - static_cast<double>(a) / static_cast<double>(qq)};
        if (better(h, dist, best, best_dist)) {
            best = h;
            best_dist = dist;
        }
    };

    // Convergents h/k of num/den; denominators increase, so stop past X.
    u128 h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    while (den != 0) {
        const u128 a = num / den;
        const u128 h = a * h1 + h2;
        const u128 k = a * k1 + k2;
        if (static_cast<double>(k) > d.X) break;
        consider(h, k);
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        const u128 r = num % den;
        num = den;
        den = r;
    }
    // 1/1 is a convergent only when the first partial quotient is 1.
    consider(1, 1);
    return best;
}

double upsilon(double alpha, const ArcDissection& d, double eps) {
    const ArcHit hit = classify(alpha, d);
    if (!hit.major) return 0.0;
    return std::pow(static_cast<double>(hit.q), eps) * w2(hit.q) / (1.0 + d.n * std::abs(hit.beta));
}

// --- oscillatory integrals ------------------------------------------------------------

double kernel_B(double gamma, double C) {
    const double r = std::sqrt(gamma);
    return 1.0 / (6.0 * r * std::cbrt((r - C) * (r - C)));
}

namespace {

[[noreturn]] void quad_fail(const char* what, cplx partial, double err) {
    throw QuadratureError(std::string(what) + ": panel budget exhausted", partial, err);
}

// Tolerances: every level stops on an absolute error of rel_tol times the
// volume it integrates over, so cancellation in the value does not force
// needless refinement.

// Shared evaluation of int_{x1 in [x_lo,x_hi]} int_{[0,Y]^2} e(beta (s T(x))^2).
// s is p^3 for v_p and 1 for v.
cplx cubature3d(double beta, double s, double x_lo, double x_hi, double Y, const OscOptions& opt) {
    auto g = [s](double t) { return s * s * t * t; };
    const double L = x_hi - x_lo;
    const double Y3 = Y * Y * Y;
    auto f3 = [&](double x1, double x2) {
        const double base = x1 * x1 * x1 + x2 * x2 * x2;
        QuadOptions o{opt.rel_tol * 0.1 * Y, 0.0, opt.max_panels, panels_for(beta * (g(base + Y3) - g(base)))};
        auto r = integrate([&](double x3) { return expi(beta * g(base + x3 * x3 * x3)); }, 0.0, Y, o);
        if (!r.converged) quad_fail("cubature3d inner", r.value, r.error);
        return r.value;
    };
    auto f2 = [&](double x1) {
        const double c = x1 * x1 * x1;
        QuadOptions o{opt.rel_tol * 0.3 * Y * Y, 0.0, opt.max_panels, panels_for(beta * (g(c + 2 * Y3) - g(c)))};
        auto r = integrate([&](double x2) { return f3(x1, x2); }, 0.0, Y, o);
        if (!r.converged) quad_fail("cubature3d middle", r.value, r.error);
        return r.value;
    };
    const double lo3 = x_lo * x_lo * x_lo, hi3 = x_hi * x_hi * x_hi;
    QuadOptions o{opt.rel_tol * Y * Y * L, 0.0, opt.max_panels, panels_for(beta * (g(hi3 + 2 * Y3) - g(lo3)) * 0.5)};
    auto r = integrate(f2, x_lo, x_hi, o);
    if (!r.converged) quad_fail("cubature3d outer", r.value, r.error);
    return r.value;
}

// Same integral with x1 traded for gamma = (s T)^2:
//   int_{[0,Y]^2} dy int_{M_y}^{N_y} (1/s') B(gamma, s C_y) e(beta gamma) d gamma
// where the x1-range maps to [(s x_lo^3 + s C_y)^2, (s x_hi^3 + s C_y)^2] and
// s' = s^{1/3} (that is, p).
cplx kernel1d(double beta, double s, double x_lo, double x_hi, double Y, const OscOptions& opt) {
    const double sp = std::cbrt(s);
    const double L = x_hi - x_lo;
    const double lo3 = x_lo * x_lo * x_lo, hi3 = x_hi * x_hi * x_hi, Y3 = Y * Y * Y;
    auto g = [s](double t) { return s * s * t * t; };
    auto vy = [&](double y1, double y2) {
        const double C = s * (y1 * y1 * y1 + y2 * y2 * y2);
        const double lo = s * lo3 + C;
        const double hi = s * hi3 + C;
        const double Mg = lo * lo, Ng = hi * hi;
        QuadOptions o{opt.rel_tol * 0.1 * L, 0.0, opt.max_panels, panels_for(beta * (Ng - Mg))};
        auto r = integrate([&](double gm) { return kernel_B(gm, C) / sp * expi(beta * gm); }, Mg, Ng, o);
        if (!r.converged) quad_fail("kernel1d inner", r.value, r.error);
        return r.value;
    };
    auto f2 = [&](double y1) {
        const double c = y1 * y1 * y1;
        QuadOptions o{opt.rel_tol * 0.3 * Y * L, 0.0, opt.max_panels, panels_for(beta * (g(hi3 + c + Y3) - g(lo3 + c)))};
        auto r = integrate([&](double y2) { return vy(y1, y2); }, 0.0, Y, o);
        if (!r.converged) quad_fail("kernel1d middle", r.value, r.error);
        return r.value;
    };
    QuadOptions o{opt.rel_tol * Y * Y * L, 0.0, opt.max_panels, panels_for(beta * (g(hi3 + 2 * Y3) - g(lo3)) * 0.5)};
    auto r = integrate(f2, 0.0, Y, o);
    if (!r.converged) quad_fail("kernel1d outer", r.value, r.error);
    return r.value;
}

}  // namespace

cplx osc_integral_v(double beta, double P, OscMethod method, const OscOptions& opt) {
    if (!(opt.rel_tol > 0)) throw ContractError("osc_integral_v: tol must be positive");
    if (method == OscMethod::cubature3d) return cubature3d(beta, 1.0, P / 2.0, P, P, opt);
    return kernel1d(beta, 1.0, P / 2.0, P, P, opt);
}

cplx osc_integral_vp(double beta, const Params& prm, u64 p, OscMethod method, const OscOptions& opt) {
    if (!(opt.rel_tol > 0)) throw ContractError("osc_integral_vp: tol must be positive");
    const double s = std::pow(static_cast<double>(p), 3.0);
    if (method == OscMethod::cubature3d) return cubature3d(beta, s, prm.H1, prm.H2, prm.H3, opt);
    return kernel1d(beta, s, prm.H1, prm.H2, prm.H3, opt);
}

// --- major-arc models ---------------------------------------------------------------------

namespace {

cplx arc_factor(i64 a, u64 q, double c_eta) {
    if (q < 1) throw ContractError("model: q must be positive");
    if (std::gcd(static_cast<u64>(a < 0 ? -a : a), q) != 1) throw ContractError("model: gcd(a, q) must be 1");
    const double q3 = std::pow(static_cast<double>(q), 3.0);
    return complete_sum_S(q, a) / q3 * c_eta * c_eta;
}

}  // namespace

cplx model_V(double alpha, i64 a, u64 q, const Params& prm, double c_eta, const OscOptions& opt) {
    const cplx f = arc_factor(a, q, c_eta);
    if (std::abs(f) == 0.0) return {0.0, 0.0};
    const double beta = alpha - static_cast<double>(a) / static_cast<double>(q);
    return f * osc_integral_v(beta, static_cast<double>(prm.P), OscMethod::kernel1d, opt);
}

cplx model_W(double alpha, i64 a, u64 q, const Params& prm, std::span<const u64> primes, double c_eta,
             const OscOptions& opt) {
    const cplx f = arc_factor(a, q, c_eta);
    if (std::abs(f) == 0.0) return {0.0, 0.0};
    const double beta = alpha - static_cast<double>(a) / static_cast<double>(q);
    cplx sum{0.0, 0.0};
    for (u64 p : primes) sum += osc_integral_vp(beta, prm, p, OscMethod::kernel1d, opt);
    return f * sum;
}

FDiagnostic F_diagnostic(double alpha, const Params& prm, const WeightTable& table_a, const WeightTable& table_b,
                         std::span<const u64> primes, const ArcDissection& d, const OscOptions& opt) {
    FDiagnostic out;
    out.alpha = alpha;
    out.hit = classify(alpha, d);
    out.h = eval_h(alpha, table_a);
    out.W = eval_W(alpha, table_b, primes);
    if (out.hit.major) {
        out.h_model = model_V(alpha, out.hit.a, out.hit.q, prm, prm.c_eta, opt);
        out.W_model = model_W(alpha, out.hit.a, out.hit.q, prm, primes, prm.c_eta, opt);
    }
    out.F = out.h * out.h * out.W * out.W - out.h_model * out.h_model * out.W_model * out.W_model;
    return out;
}

// --- exact representation count ----------------------------------------------------------------

namespace {

PairSums pair_up(const std::vector<std::pair<u64, u64>>& terms) {
    std::vector<std::pair<u64, u64>> all;
    MemoryBudget::require(terms.size() * terms.size(), sizeof(std::pair<u64, u64>), "pair-sum staging");
    all.reserve(terms.size() * terms.size());
    for (const auto& [v1, m1] : terms) {
        for (const auto& [v2, m2] : terms) {
            if (v1 > (u64{1} << 63) - v2) throw CapacityError("pair sum exceeds 63 bits");
            const u128 w = static_cast<u128>(m1) * m2;
            if (w >> 64) throw CapacityError("pair weight exceeds 64 bits");
            all.emplace_back(v1 + v2, static_cast<u64>(w));
        }
    }
    std::sort(all.begin(), all.end());
    PairSums out;
    for (const auto& [v, w] : all) {
        if (!out.value.empty() && out.value.back() == v) {
            out.weight.back() += w;
        } else {
            out.value.push_back(v);
            out.weight.push_back(w);
        }
    }
    return out;
}

std::vector<std::pair<u64, u64>> h_terms(const WeightTable& ta) {
    if (ta.role != Role::a) throw ContractError("table_a must have role a");
    std::vector<std::pair<u64, u64>> t;
    for (std::size_t i = 0; i < ta.size(); ++i) {
        const u128 x2 = square(ta.support[i]);
        if (x2 >> 62) throw CapacityError("x^2 exceeds 62 bits");
        t.emplace_back(static_cast<u64>(x2), ta.multiplicity[i]);
    }
    return t;
}

std::vector<std::pair<u64, u64>> w_terms(const WeightTable& tb, std::span<const u64> primes) {
    if (tb.role != Role::b) throw ContractError("table_b must have role b");
    if (primes.empty()) throw DegenerateError("degenerate prime range (no prime in [M/2, M])");
    std::vector<std::pair<u64, u64>> t;
    for (u64 p : primes) {
        const u64 p6 = p_sixth(p);
        for (std::size_t i = 0; i < tb.size(); ++i) {
            const u128 v = static_cast<u128>(p6) * square(tb.support[i]);
            if (v >> 62) throw CapacityError("p^6 h^2 exceeds 62 bits");
            t.emplace_back(static_cast<u64>(v), tb.multiplicity[i]);
        }
    }
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

PairSums pair_sums_h(const WeightTable& table_a) { return pair_up(h_terms(table_a)); }

PairSums pair_sums_W(const WeightTable& table_b, std::span<const u64> primes) {
    return pair_up(w_terms(table_b, primes));
}

u128 exact_Rn(u64 n, const WeightTable& table_a, const WeightTable& table_b, std::span<const u64> primes) {
    return exact_R_range(n, n, table_a, table_b, primes, Exec::serial)[0];
}

std::vector<u128> exact_R_range(u64 lo, u64 hi, const WeightTable& table_a, const WeightTable& table_b,
                                std::span<const u64> primes, Exec exec) {
    if (hi < lo) throw ContractError("exact_R_range: empty window");
    const u64 len = hi - lo + 1;
    MemoryBudget::require(len, sizeof(u128), "R(n) window");
    const PairSums A = pair_sums_h(table_a);
    const PairSums B = pair_sums_W(table_b, primes);
    std::vector<u128> out(len, 0);

    auto accumulate_into = [&](std::vector<u128>& dst, std::size_t i) {
        const u64 va = A.value[i];
        if (va > hi) return;
        const u64 need_lo = va >= lo ? 0 : lo - va;
        const u64 need_hi = hi - va;
        auto it = std::lower_bound(B.value.begin(), B.value.end(), need_lo);
        for (; it != B.value.end() && *it <= need_hi; ++it) {
            const std::size_t j = static_cast<std::size_t>(it - B.value.begin());
            dst[va + *it - lo] += static_cast<u128>(A.weight[i]) * B.weight[j];
        }
    };

    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < A.value.size(); ++i) accumulate_into(out, i);
        return out;
    }
#pragma omp parallel
    {
        std::vector<u128> local(len, 0);
#pragma omp for schedule(dynamic, 64) nowait
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(A.value.size()); ++i) {
            accumulate_into(local, static_cast<std::size_t>(i));
        }
#pragma omp critical
        for (u64 k = 0; k < len; ++k) out[k] += local[k];
    }
    return out;
}

DftCounts exact_R_dft(const WeightTable& table_a, const WeightTable& table_b, std::span<const u64> primes) {
    const auto ht = h_terms(table_a);
    const auto wt = w_terms(table_b, primes);
    if (ht.empty() || wt.empty()) return {1, {0}, 0.0};
    u64 max_h = 0, max_w = 0;
    for (const auto& t : ht) max_h = std::max(max_h, t.first);
    for (const auto& t : wt) max_w = std::max(max_w, t.first);
    const u64 degree = 2 * max_h + 2 * max_w;
    u64 G = 1;
    while (G <= degree) G <<= 1;
    MemoryBudget::require(G, 2 * sizeof(double) + sizeof(fftw_complex) + sizeof(u64), "DFT grid");

    DftCounts out;
    out.grid = G;
    const std::size_t nc = G / 2 + 1;
    double* fa = fftw_alloc_real(G);
    double* fb = fftw_alloc_real(G);
    fftw_complex* ca = fftw_alloc_complex(nc);
    fftw_complex* cb = fftw_alloc_complex(nc);
    std::fill(fa, fa + G, 0.0);
    std::fill(fb, fb + G, 0.0);
    for (const auto& [v, m] : ht) fa[v] += static_cast<double>(m);
    for (const auto& [v, m] : wt) fb[v] += static_cast<double>(m);

    fftw_plan pa = fftw_plan_dft_r2c_1d(static_cast<int>(G), fa, ca, FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_r2c_1d(static_cast<int>(G), fb, cb, FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::size_t k = 0; k < nc; ++k) {
        const cplx a(ca[k][0], ca[k][1]);
        const cplx b(cb[k][0], cb[k][1]);
        const cplx v = a * a * b * b;
        ca[k][0] = v.real();
        ca[k][1] = v.imag();
    }
    fftw_plan pi = fftw_plan_dft_c2r_1d(static_cast<int>(G), ca, fa, FFTW_ESTIMATE);
    fftw_execute(pi);

    out.R.resize(G);
    for (u64 k = 0; k < G; ++k) {
        const double x = fa[k] / static_cast<double>(G);
        const double r = std::round(x);
        out.max_rounding = std::max(out.max_rounding, std::abs(x - r));
        out.R[k] = r < 0 ? 0 : static_cast<u64>(r);
    }
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pi);
    fftw_free(fa);
    fftw_free(fb);
    fftw_free(ca);
    fftw_free(cb);
    if (out.max_rounding >= 0.25) {
        throw VerificationError("exact_R_dft: coefficient off an integer by " + std::to_string(out.max_rounding));
    }
    return out;
}

// --- singular integral -----------------------------------------------------------------------------

namespace {

double g_of(const JFactor& f, double u) {
    const double t = f.s * u * u * u + f.C;
    return t * t;
}

double g_inv(const JFactor& f, double v) {
    const double r = std::sqrt(std::max(v, 0.0)) - f.C;
    return std::cbrt(std::max(r, 0.0) / f.s);
}

double g_prime(const JFactor& f, double u) { return 6.0 * f.s * u * u * (f.s * u * u * u + f.C); }

struct Nested {
    const JConfig& cfg;
    double tol;
    bool ok = true;
    double err = 0;
    std::array<double, 4> glo{}, ghi{};
    std::array<double, 4> tail_lo{}, tail_hi{};  // sum of g over factors i..3
    std::array<double, 4> scale{};                // typical size of density(i, .)

    Nested(const JConfig& c, double t) : cfg(c), tol(t) {
        for (int i = 0; i < 4; ++i) {
            glo[i] = g_of(cfg[i], cfg[i].lo);
            ghi[i] = g_of(cfg[i], cfg[i].hi);
        }
        for (int i = 3; i >= 0; --i) {
            tail_lo[i] = glo[i] + (i < 3 ? tail_lo[i + 1] : 0.0);
            tail_hi[i] = ghi[i] + (i < 3 ? tail_hi[i + 1] : 0.0);
        }
        double vol = 1.0;
        for (int i = 3; i >= 0; --i) {
            vol *= cfg[i].hi - cfg[i].lo;
            scale[i] = vol / (tail_hi[i] - tail_lo[i]);
        }
    }

    // Density at m of g_i(u_i) + ... + g_3(u_3).
    double density(int i, double m) {
        if (m <= tail_lo[i] || m >= tail_hi[i]) return 0.0;
        const JFactor& f = cfg[i];
        if (i == 3) {
            const double u = g_inv(f, m);
            return 1.0 / g_prime(f, u);
        }
        // u_i ranges where m - g_i(u_i) lies in the support of the rest.
        const double vlo = std::max(glo[i], m - tail_hi[i + 1]);
        const double vhi = std::min(ghi[i], m - tail_lo[i + 1]);
        if (vhi <= vlo) return 0.0;
        const double ulo = std::clamp(g_inv(f, vlo), f.lo, f.hi);
        const double uhi = std::clamp(g_inv(f, vhi), f.lo, f.hi);
        if (uhi <= ulo) return 0.0;
        QuadOptions o;
        o.rel_tol = tol;
        o.abs_tol = tol * 1e-2 * scale[i];
        o.max_panels = 200;
        auto r = integrate([&](double u) { return density(i + 1, m - g_of(f, u)); }, ulo, uhi, o);
        if (!r.converged) {
            ok = false;
            if (i == 0) err += r.error;
        }
        return r.value;
    }
};

}  // namespace

InnerResult J_inner(double n, const JConfig& cfg, double rel_tol) {
    for (const auto& f : cfg) {
        if (!(f.s > 0 && f.C >= 0 && f.lo > 0 && f.hi > f.lo)) throw ContractError("J_inner: bad factor");
    }
    Nested nest(cfg, rel_tol);
    InnerResult r;
    r.value = nest.density(0, n);
    r.converged = nest.ok;
    r.error = nest.err;
    return r;
}

InnerResult J_inner_beta(double n, const JConfig& cfg, double beta_max, double rel_tol) {
    auto v_i = [&](const JFactor& f, double beta) {
        QuadOptions o{0.0, rel_tol * 1e-2, 4000, panels_for(beta * (g_of(f, f.hi) - g_of(f, f.lo)))};
        o.abs_tol = rel_tol * 1e-4 * (f.hi - f.lo);
        return integrate([&](double u) { return expi(beta * g_of(f, u)); }, f.lo, f.hi, o).value;
    };
    double gmax = 0;
    for (const auto& f : cfg) gmax += g_of(f, f.hi);
    QuadOptions o{0.0, rel_tol, 200000, panels_for(beta_max * std::max(gmax, n))};
    double vol = 1;
    for (const auto& f : cfg) vol *= f.hi - f.lo;
    o.abs_tol = rel_tol * 1e-3 * vol / std::max(gmax, 1.0);
    auto r = integrate(
        [&](double beta) {
            cplx v = expi(-n * beta);
            for (const auto& f : cfg) v *= v_i(f, beta);
            return v.real();
        },
        0.0, beta_max, o);
    return {2.0 * r.value, 2.0 * r.error, r.converged};
}

JEstimate singular_integral_J(double n, const Params& prm, std::span<const u64> primes_in, const JOptions& opt,
                              Exec exec) {
    if (opt.samples < 1000) throw ContractError("singular_integral_J: budget must be at least 1000 samples");
    if (primes_in.empty()) throw DegenerateError("singular_integral_J: degenerate prime range");
    std::vector<u64> primes(primes_in.begin(), primes_in.end());
    const u64 h3 = prm.H3 >= 1.0 ? static_cast<u64>(std::floor(prm.H3)) : 0;
    if (h3 == 0) throw DegenerateError("singular_integral_J: H3 < 1, no smooth pairs");
    std::vector<u64> AH = enumerate_smooth(h3, prm.R, exec).members;
    std::vector<u64> AP = enumerate_smooth(prm.P, prm.R, exec).members;
    if (opt.restricted) {
        std::vector<u64> kept;
        for (u64 p : primes) {
            if (static_cast<double>(p) <= 0.51 * prm.M) kept.push_back(p);
        }
        if (kept.empty()) kept.push_back(*std::min_element(primes.begin(), primes.end()));
        primes = kept;
        std::erase_if(AP, [&](u64 y) { return 2 * y > prm.P; });
    }

    JEstimate est;
    est.samples = opt.samples;
    const double np = static_cast<double>(primes.size());
    const double nh = static_cast<double>(AH.size());
    const double nA = static_cast<double>(AP.size());
    est.configurations = np * np * std::pow(nh, 4.0) * std::pow(nA, 4.0);

    std::vector<InnerResult> res(opt.samples);
    const double P = static_cast<double>(prm.P);
    auto run = [&](u64 i) {
        CounterRng rng(opt.seed, i);
        JConfig cfg;
        for (int k = 0; k < 2; ++k) {
            const double p3 = std::pow(static_cast<double>(primes[rng.below(primes.size())]), 3.0);
            const double y1 = static_cast<double>(AH[rng.below(AH.size())]);
            const double y2 = static_cast<double>(AH[rng.below(AH.size())]);
            cfg[k] = {p3, p3 * (y1 * y1 * y1 + y2 * y2 * y2), prm.H1, prm.H2};
        }
        for (int k = 2; k < 4; ++k) {
            const double y1 = static_cast<double>(AP[rng.below(AP.size())]);
            const double y2 = static_cast<double>(AP[rng.below(AP.size())]);
            cfg[k] = {1.0, y1 * y1 * y1 + y2 * y2 * y2, P / 2.0, P};
        }
        res[i] = J_inner(n, cfg, opt.rel_tol);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(opt.samples); ++i) run(static_cast<u64>(i));
    } else {
        for (u64 i = 0; i < opt.samples; ++i) run(i);
    }

    // Fixed-order reduction.
    double sum = 0, sum2 = 0, qerr = 0;
    for (const auto& r : res) {
        sum += r.value;
        sum2 += r.value * r.value;
        if (!r.converged) {
            ++est.quadrature_failures;
            qerr += r.error;
        }
    }
    const double N = static_cast<double>(opt.samples);
    const double mean = sum / N;
    const double var = std::max(0.0, sum2 / N - mean * mean) * N / (N - 1.0);
    est.value = est.configurations * mean;
    est.stderr_ = est.configurations * std::sqrt(var / N);
    if (est.quadrature_failures > 0) {
        est.flagged = true;
        est.stderr_ += est.configurations * qerr / N;
    }
    return est;
}

// --- main term ------------------------------------------------------------------------------------------

MainTermReport main_term_report(u64 n_lo, u64 n_hi, int n_samples, u64 Q, const Params& prm,
                                const WeightTable& table_a, const WeightTable& table_b,
                                std::span<const u64> primes, const JOptions& jopt) {
    if (n_hi < n_lo || n_samples < 1) throw ContractError("main_term_report: bad window");
    MainTermReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    const auto R = exact_R_range(n_lo, n_hi, table_a, table_b, primes);
    double rsum = 0;
    for (u128 v : R) rsum += static_cast<double>(v);
    rep.R_exact = rsum / static_cast<double>(R.size());

    const double len = static_cast<double>(n_hi - n_lo + 1);
    double ssum = 0, jsum = 0, var = 0, psum = 0;
    for (int k = 0; k < n_samples; ++k) {
        const u64 n = n_lo + static_cast<u64>(std::floor((k + 0.5) * len / n_samples));
        rep.sampled_n.push_back(n);
        const double S = truncated_singular_series(static_cast<i64>(n), Q).value;
        JOptions o = jopt;
        o.seed = jopt.seed + 1000003ull * static_cast<u64>(k);
        const JEstimate J = singular_integral_J(static_cast<double>(n), prm, primes, o);
        ssum += S;
        jsum += J.value;
        var += J.stderr_ * J.stderr_;
        psum += S * J.value;
    }
    const double ns = n_samples;
    rep.S_trunc = ssum / ns;
    rep.J_est = jsum / ns;
    rep.J_stderr = std::sqrt(var) / ns;
    rep.predicted = psum / ns;
    rep.ratio = rep.predicted != 0.0 ? rep.R_exact / rep.predicted : 0.0;
    return rep;
}

void write_report_json(std::ostream& os, const MainTermReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n_lo == r.n_hi ? r.n_lo : (r.n_lo + r.n_hi) / 2;
    j["n_lo"] = r.n_lo;
    j["n_hi"] = r.n_hi;
    j["sampled_n"] = r.sampled_n;
    j["R_exact"] = r.R_exact;
    j["S_trunc"] = r.S_trunc;
    j["J_est"] = r.J_est;
    j["J_stderr"] = r.J_stderr;
    j["predicted"] = r.predicted;
    j["ratio"] = r.ratio;
    os << j.dump(2) << '\n';
}

}  // namespace cubesq
