#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "cubesq/arcs.hpp"
#include "cubesq/numtheory.hpp"

using namespace cubesq;

namespace {

WeightTable toy_a() {
    WeightTable t;
    t.role = Role::a;
    t.support = {10, 17, 24};
    t.multiplicity = {1, 2, 1};
    return t;
}

cplx direct_sum(double alpha, const std::vector<std::pair<long double, u64>>& terms) {
    cplx s{0, 0};
    for (const auto& [x, w] : terms) {
        const long double ph = alpha * x;
        const long double fr = ph - std::floor(ph);
        s += static_cast<double>(w) * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(fr));
    }
    return s;
}

// Every (a, q) with q <= X, gcd 1, within X/(qn) of alpha; smallest q, then nearest.
ArcHit exhaustive(double alpha, const ArcDissection& d) {
    ArcHit best;
    double best_dist = 0;
    for (u64 q = 1; static_cast<double>(q) <= d.X; ++q) {
        for (u64 a = 0; a <= q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            const double beta = alpha - static_cast<double>(a) / static_cast<double>(q);
            if (std::abs(beta) > d.half_width(q)) continue;
            if (!best.major || q < best.q || (q == best.q && std::abs(beta) < best_dist)) {
                best = {true, static_cast<i64>(a), q, beta};
                best_dist = std::abs(beta);
            }
        }
        if (best.major) break;
    }
    return best;
}

// Square-sum distribution by looping over every weighted quadruple.
std::map<u64, u128> brute_R(const WeightTable& ta, const WeightTable& tb, const std::vector<u64>& primes) {
    std::vector<std::pair<u64, u64>> hs, ws;
    for (std::size_t i = 0; i < ta.size(); ++i) hs.emplace_back(ta.support[i] * ta.support[i], ta.multiplicity[i]);
    for (u64 p : primes) {
        const u64 p6 = ipow(p, 6);
        for (std::size_t i = 0; i < tb.size(); ++i)
            ws.emplace_back(p6 * tb.support[i] * tb.support[i], tb.multiplicity[i]);
    }
    std::map<u64, u128> out;
    for (auto [x1, w1] : hs)
        for (auto [x2, w2] : hs)
            for (auto [y1, v1] : ws)
                for (auto [y2, v2] : ws) out[x1 + x2 + y1 + y2] += static_cast<u128>(w1) * w2 * v1 * v2;
    return out;
}

}  // namespace

TEST_CASE("h on the toy table") {
    const auto t = toy_a();
    const cplx v = eval_h(0.25, t);
    CHECK(v.real() == doctest::Approx(2.0));
    CHECK(v.imag() == doctest::Approx(2.0));
    CHECK(std::abs(eval_h(0.0, t) - cplx(4, 0)) < 1e-12);
    // h(1 - a) = conj h(a).
    for (double a : {0.1, 0.37, 0.81}) CHECK(std::abs(eval_h(1 - a, t) - std::conj(eval_h(a, t))) < 1e-9);
    WeightTable b = t;
    b.role = Role::b;
    CHECK_THROWS_AS(eval_h(0.1, b), ContractError);
}

TEST_CASE("h and W match direct summation") {
    const Params prm = params_from_P(20, 0.5);
    const auto ta = build_weight_table(prm, Role::a);
    const auto tb = build_weight_table(prm, Role::b);
    const std::vector<u64> primes = {2, 3};
    std::vector<std::pair<long double, u64>> hs, ws;
    for (std::size_t i = 0; i < ta.size(); ++i)
        hs.emplace_back(static_cast<long double>(ta.support[i]) * ta.support[i], ta.multiplicity[i]);
    for (u64 p : primes)
        for (std::size_t i = 0; i < tb.size(); ++i)
            ws.emplace_back(static_cast<long double>(ipow(p, 6)) * tb.support[i] * tb.support[i], tb.multiplicity[i]);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<u64> den(1, 1u << 20);
    for (int k = 0; k < 20; ++k) {
        // Dyadic alpha keeps the long double oracle exact.
        const double alpha = static_cast<double>(den(rng)) / static_cast<double>(1u << 20);
        if (alpha >= 1.0) continue;
        CHECK(std::abs(eval_h(alpha, ta) - direct_sum(alpha, hs)) < 1e-8 * static_cast<double>(ta.total_mass()));
        CHECK(std::abs(eval_W(alpha, tb, primes) - direct_sum(alpha, ws)) < 1e-8 * static_cast<double>(tb.total_mass()));
    }
    CHECK(std::abs(eval_h(0.0, ta) - cplx(double(expected_mass(prm, Role::a)), 0)) < 1e-9);
    CHECK_THROWS_AS(eval_W(0.1, tb, {}), DegenerateError);
    CHECK(eval_W(0.1, tb, {}, true) == cplx(0, 0));
}

TEST_CASE("classifier matches exhaustive search") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double X : {1.0, 2.0, 3.5, 7.0, 20.0, 50.0}) {
        for (double n : {10.0, 1e3, 1e5, 1e8}) {
            const ArcDissection d{X, n, kTau};
            for (int k = 0; k < 400; ++k) {
                double alpha = U(rng);
                // Half of the draws land near a rational to exercise the arcs.
                if (k % 2 == 0) {
                    const u64 q = 1 + rng() % static_cast<u64>(std::max(1.0, X));
                    const u64 a = rng() % (q + 1);
                    alpha = std::clamp(double(a) / double(q) + (U(rng) - 0.5) * 2.2 * d.half_width(q), 0.0,
                                       std::nextafter(1.0, 0.0));
                }
                const ArcHit ref = exhaustive(alpha, d);
                for (const ArcHit& h : {classify(alpha, d), classify_scan(alpha, d)}) {
                    REQUIRE(h.major == ref.major);
                    if (ref.major) {
                        CHECK(h.q == ref.q);
                        CHECK(h.a == ref.a);
                        CHECK(std::abs(h.beta - ref.beta) < 1e-15);
                    }
                }
            }
        }
    }
    const ArcHit h = classify(0.5, ArcDissection{2.0, 100.0, kTau});
    CHECK(h.major);
    CHECK(h.a == 1);
    CHECK(h.q == 2);
    CHECK(upsilon(0.5, ArcDissection{2.0, 100.0, kTau}, 0.0) == doctest::Approx(std::pow(8.0, -1.0 / 6)));
    CHECK_FALSE(classify(0.3, ArcDissection{2.0, 1e6, kTau}).major);
    CHECK(upsilon(0.3, ArcDissection{2.0, 1e6, kTau}, 0.1) == 0.0);
    CHECK_THROWS_AS(classify(1.0, ArcDissection{}), ContractError);
}

TEST_CASE("arc dissections") {
    const Params prm = params_from_P(100, 0.1);
    const auto M = major_arcs(prm, 1e12);
    CHECK(M.X == doctest::Approx(std::pow(100.0, 0.8)));
    CHECK(M.half_width(2) == doctest::Approx(M.X / 2e12));
    const auto Nn = narrow_arcs(prm, 1e12);
    CHECK(Nn.X == doctest::Approx(std::pow(std::log(100.0), kTau)));
}

TEST_CASE("oscillatory integrals at zero give the volumes") {
    for (double P : {4.0, 8.0}) {
        for (OscMethod m : {OscMethod::cubature3d, OscMethod::kernel1d}) {
            const cplx v = osc_integral_v(0.0, P, m);
            CHECK(v.real() == doctest::Approx(P * P * P / 2).epsilon(1e-6));
            CHECK(std::abs(v.imag()) < 1e-6 * P * P * P);
        }
    }
    const Params prm = params_from_P(16, 0.5);
    const double vol = (prm.H2 - prm.H1) * prm.H3 * prm.H3;
    for (OscMethod m : {OscMethod::cubature3d, OscMethod::kernel1d}) {
        CHECK(osc_integral_vp(0.0, prm, 2, m).real() == doctest::Approx(vol).epsilon(1e-6));
    }
}

TEST_CASE("the two oscillatory methods agree at small phase") {
    const double P = 4.0;
    const double n = std::pow(P, 6);
    for (double bn : {0.3, -1.0}) {
        const cplx a = osc_integral_v(bn / n, P, OscMethod::cubature3d);
        const cplx b = osc_integral_v(bn / n, P, OscMethod::kernel1d);
        CHECK(std::abs(a - b) < 1e-4 * std::abs(a));
        // v(-beta) = conj v(beta).
        CHECK(std::abs(osc_integral_v(-bn / n, P, OscMethod::kernel1d) - std::conj(b)) < 1e-6 * std::abs(b));
    }
    CHECK(kernel_B(4.0, 1.0) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("exact R(n): sparse, DFT and brute force agree") {
    for (u64 P : {4u, 8u}) {
        const Params prm = params_from_P(P, 0.5);
        const auto ta = build_weight_table(prm, Role::a);
        const auto tb = build_weight_table(prm, Role::b);
        const std::vector<u64> primes = {2};
        const auto ref = brute_R(ta, tb, primes);
        const u64 top = ref.rbegin()->first;
        const auto range = exact_R_range(0, top, ta, tb, primes);
        const auto serial = exact_R_range(0, top, ta, tb, primes, Exec::serial);
        CHECK(range == serial);
        const auto dft = exact_R_dft(ta, tb, primes);
        CHECK(dft.grid > top);
        CHECK((dft.grid & (dft.grid - 1)) == 0);
        CHECK(dft.max_rounding < 0.25);
        u64 mismatches = 0;
        for (u64 n = 0; n <= top; ++n) {
            const auto it = ref.find(n);
            const u128 want = it == ref.end() ? 0 : it->second;
            mismatches += range[n] != want;
            mismatches += static_cast<u128>(dft.R[n]) != want;
        }
        CHECK(mismatches == 0);
        CHECK(exact_Rn(top, ta, tb, primes) == ref.rbegin()->second);
    }
}

TEST_CASE("toy representation count") {
    const auto ta = toy_a();
    WeightTable tb;
    tb.role = Role::b;
    tb.support = {1};
    tb.multiplicity = {1};
    // 3^2 + 3^2 + 2^6 (1^2 + 1^2) uses values 3 only, which the toy table lacks.
    WeightTable ta3 = ta;
    ta3.support = {3};
    ta3.multiplicity = {1};
    const std::vector<u64> p2 = {2};
    CHECK(exact_Rn(18 + 128, ta3, tb, p2) == 1);
    CHECK(exact_Rn(18 + 2 * 729, ta3, tb, std::vector<u64>{3}) == 1);
    CHECK(exact_Rn(200 + 128, ta, tb, p2) == 1);
    CHECK(exact_Rn(200 + 129, ta, tb, p2) == 0);
}

TEST_CASE("inner density matches a Monte Carlo histogram") {
    JConfig cfg;
    for (auto& f : cfg) f = {1.0, 0.5, 0.2, 1.0};
    const double n = 4.0;
    const auto r = J_inner(n, cfg, 1e-7);
    CHECK(r.converged);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    const u64 draws = 4'000'000;
    const double h = 0.02;
    u64 hits = 0;
    for (u64 k = 0; k < draws; ++k) {
        double s = 0;
        for (int i = 0; i < 4; ++i) {
            const double u = U(rng);
            const double t = u * u * u + 0.5;
            s += t * t;
        }
        hits += std::abs(s - n) < h;
    }
    const double mc = static_cast<double>(hits) / (static_cast<double>(draws) * 2 * h) * std::pow(0.8, 4);
    CHECK(r.value == doctest::Approx(mc).epsilon(0.03));
    // Outside the support the density vanishes.
    CHECK(J_inner(0.5, cfg).value == 0.0);
    CHECK(J_inner(20.0, cfg).value == 0.0);
    JConfig bad = cfg;
    bad[1].lo = 0.0;
    CHECK_THROWS_AS(J_inner(n, bad), ContractError);
}

TEST_CASE("inner density: real-space and frequency routes agree") {
    JConfig cfg;
    cfg[0] = {1.0, 0.5, 0.2, 1.0};
    cfg[1] = {1.0, 0.3, 0.4, 1.1};
    cfg[2] = {1.0, 0.0, 0.5, 1.0};
    cfg[3] = {2.0, 0.1, 0.3, 0.9};
    for (double n : {3.0, 5.0}) {
        const auto a = J_inner(n, cfg, 1e-7);
        const auto b = J_inner_beta(n, cfg, 60.0, 1e-6);
        CHECK(a.value == doctest::Approx(b.value).epsilon(0.02));
    }
}

TEST_CASE("singular integral estimate is deterministic and positive") {
    const Params prm = params_from_P(20, 0.5);
    const std::vector<u64> primes = {2, 3};
    JOptions o;
    o.samples = 1000;
    o.seed = 5;
    const double n = 2.0 * std::pow(20.0, 6);
    const auto a = singular_integral_J(n, prm, primes, o, Exec::parallel);
    const auto b = singular_integral_J(n, prm, primes, o, Exec::serial);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.value >= 0.0);
    CHECK(a.configurations > 0.0);
    o.samples = 999;
    CHECK_THROWS_AS(singular_integral_J(n, prm, primes, o), ContractError);
    o.samples = 1000;
    CHECK_THROWS_AS(singular_integral_J(n, prm, {}, o), DegenerateError);
    // Far outside the attainable range J vanishes.
    CHECK(singular_integral_J(1.0, prm, primes, o).value == 0.0);
}
