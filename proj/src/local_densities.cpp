#include "cubesq/local_densities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "cubesq/numtheory.hpp"

namespace cubesq {

namespace mp = boost::multiprecision;

namespace {

u64 reduce_mod(i64 a, u64 q) {
    const i64 qi = static_cast<i64>(q);
    i64 r = a % qi;
    if (r < 0) r += qi;
    return static_cast<u64>(r);
}

BigInt to_big(u128 v) {
    BigInt b = static_cast<u64>(v >> 64);
    b <<= 64;
    b += static_cast<u64>(v);
    return b;
}

mp::uint256_t to_u256(u128 v) {
    mp::uint256_t b = static_cast<u64>(v >> 64);
    b <<= 64;
    b += static_cast<u64>(v);
    return b;
}

std::vector<cplx> root_table(u64 q) {
    std::vector<cplx> roots(q);
    for (u64 k = 0; k < q; ++k) roots[k] = expi(static_cast<double>(k) / static_cast<double>(q));
    return roots;
}

}  // namespace

u128 ResidueDistribution::total() const {
    u128 s = 0;
    for (u128 c : counts) s += c;
    return s;
}

ResidueDistribution cube_residue_counts(u64 q) {
    if (q < 1) throw ContractError("cube_residue_counts: q must be positive");
    MemoryBudget::require(q, sizeof(u128), "cube residue counts");
    ResidueDistribution d{q, std::vector<u128>(q, 0)};
    for (u64 r = 1; r <= q; ++r) d.counts[mulmod(mulmod(r, r, q), r, q)] += 1;
    return d;
}

ResidueDistribution t_distribution(u64 q, Exec exec, ConvMethod method) {
    const ResidueDistribution c = cube_residue_counts(q);
    std::vector<u128> two = cyclic_convolve(c.counts, c.counts, exec, method);
    std::vector<u128> three = cyclic_convolve(two, c.counts, exec, method);
    return {q, std::move(three)};
}

ResidueDistribution square_map(const ResidueDistribution& d) {
    ResidueDistribution out{d.q, std::vector<u128>(d.q, 0)};
    for (u64 s = 0; s < d.q; ++s) out.counts[mulmod(s, s, d.q)] += d.counts[s];
    return out;
}

// --- exponential sums ---------------------------------------------------

cplx complete_sum_S(const ResidueDistribution& tdist, i64 a) {
    const u64 q = tdist.q;
    const u64 ar = reduce_mod(a, q);
    KahanSum acc;
    for (u64 t = 0; t < q; ++t) {
        if (tdist.counts[t] == 0) continue;
        const u64 k = mulmod(ar, mulmod(t, t, q), q);
        acc.add(static_cast<double>(tdist.counts[t]) * expi(static_cast<double>(k) / static_cast<double>(q)));
    }
    return acc.value();
}

cplx complete_sum_S(u64 q, i64 a) { return complete_sum_S(t_distribution(q), a); }

std::vector<cplx> complete_sum_table(u64 q, Exec exec) {
    const ResidueDistribution d = t_distribution(q, exec);
    const std::vector<cplx> roots = root_table(q);
    std::vector<u64> support;
    std::vector<u64> tsq;
    std::vector<double> weight;
    for (u64 t = 0; t < q; ++t) {
        if (d.counts[t] == 0) continue;
        support.push_back(t);
        tsq.push_back(mulmod(t, t, q));
        weight.push_back(static_cast<double>(d.counts[t]));
    }
    std::vector<cplx> out(q);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t ai = 0; ai < static_cast<std::ptrdiff_t>(q); ++ai) {
        const u64 a = static_cast<u64>(ai);
        KahanSum acc;
        for (std::size_t i = 0; i < support.size(); ++i) acc.add(weight[i] * roots[mulmod(a, tsq[i], q)]);
        out[a] = acc.value();
    }
    return out;
}

cplx gauss_sum_S2(u64 q, i64 a) {
    if (q < 1) throw ContractError("gauss_sum_S2: q must be positive");
    const u64 ar = reduce_mod(a, q);
    if (std::gcd(ar, q) != 1) throw ContractError("gauss_sum_S2: gcd(a, q) must be 1");
    KahanSum acc;
    for (u64 r = 1; r <= q; ++r) {
        const u64 k = mulmod(ar, mulmod(r, r, q), q);
        acc.add(expi(static_cast<double>(k) / static_cast<double>(q)));
    }
    return acc.value();
}

FourthPowers fourth_powers(u64 q, Exec exec) {
    FourthPowers fp;
    fp.q = q;
    const std::vector<cplx> table = complete_sum_table(q, exec);
    const double scale = 1.0 / (static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q));
    if (q == 1) {
        fp.a.push_back(0);
        fp.value.push_back(1.0);
        return fp;
    }
    for (u64 a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        const cplx s = table[a] * scale;
        const cplx s2 = s * s;
        fp.a.push_back(a);
        fp.value.push_back(s2 * s2);
    }
    return fp;
}

cplx coefficient_Sn_complex(const FourthPowers& fp, i64 n) {
    const u64 q = fp.q;
    const u64 nr = reduce_mod(n, q);
    KahanSum acc;
    for (std::size_t i = 0; i < fp.a.size(); ++i) {
        const u64 k = mulmod(nr, fp.a[i], q);
        acc.add(fp.value[i] * expi(-static_cast<double>(k) / static_cast<double>(q)));
    }
    return acc.value();
}

cplx coefficient_Sn_complex(u64 q, i64 n) { return coefficient_Sn_complex(fourth_powers(q, Exec::serial), n); }

double coefficient_Sn(u64 q, i64 n) {
    const cplx v = coefficient_Sn_complex(q, n);
    if (std::abs(v.imag()) >= 1e-8) {
        throw VerificationError("coefficient_Sn: imaginary part " + std::to_string(v.imag()) + " at q = " +
                                std::to_string(q));
    }
    return v.real();
}

SeriesResult truncated_singular_series(i64 n, u64 Q, SeriesMethod method, Exec exec) {
    if (Q < 1) throw ContractError("truncated_singular_series: Q must be at least 1");
    SeriesResult res;
    res.n = n;
    res.Q = Q;
    res.terms.assign(Q + 1, 0.0);
    res.terms[1] = 1.0;

    if (method == SeriesMethod::direct) {
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
        for (std::ptrdiff_t qi = 2; qi <= static_cast<std::ptrdiff_t>(Q); ++qi) {
            res.terms[static_cast<std::size_t>(qi)] =
                coefficient_Sn_complex(fourth_powers(static_cast<u64>(qi), Exec::serial), n).real();
        }
    } else {
        std::vector<u64> prime_powers;
        for (u64 p : primes_up_to(Q)) {
            for (u64 pk = p; pk <= Q; pk *= p) {
                prime_powers.push_back(pk);
                if (pk > Q / p) break;
            }
        }
        std::vector<double> pp_value(prime_powers.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(prime_powers.size()); ++i) {
            const u64 pk = prime_powers[static_cast<std::size_t>(i)];
            pp_value[static_cast<std::size_t>(i)] = coefficient_Sn_complex(fourth_powers(pk, Exec::serial), n).real();
        }
        std::map<u64, double> lookup;
        for (std::size_t i = 0; i < prime_powers.size(); ++i) lookup[prime_powers[i]] = pp_value[i];
        for (u64 q = 2; q <= Q; ++q) {
            double v = 1.0;
            for (const auto& [p, k] : factorize(q)) v *= lookup.at(ipow(p, k));
            res.terms[q] = v;
        }
    }

    double sum = 0.0;
    for (u64 q = 1; q <= Q; ++q) sum += res.terms[q];
    res.value = sum;
    for (u64 lo = Q / 2; lo >= 1; lo /= 2) res.tails.push_back({lo, 2 * lo, dyadic_tail(res, lo, 2 * lo)});
    return res;
}

double dyadic_tail(const SeriesResult& s, u64 lo, u64 hi) {
    if (hi > s.Q) throw ContractError("dyadic_tail: range exceeds the computed truncation");
    double acc = 0.0;
    for (u64 q = lo + 1; q <= hi; ++q) acc += std::abs(s.terms[q]);
    return acc;
}

// --- local counts -------------------------------------------------------

namespace {

std::vector<u128> pair_square_counts(u64 q, Exec exec) {
    const ResidueDistribution sq = square_map(t_distribution(q, exec));
    return cyclic_convolve(sq.counts, sq.counts, exec);
}

u64 modulus_for(u64 p, int h, u64 budget_entries) {
    if (!is_prime(p)) throw ContractError("local counts: p must be prime");
    if (h < 1) throw ContractError("local counts: h must be positive");
    u128 q = 1;
    for (int i = 0; i < h; ++i) {
        q *= p;
        if (q > budget_entries) {
            throw CapacityError("local counts: p^h = " + std::to_string(p) + "^" + std::to_string(h) +
                                " exceeds the budget of " + std::to_string(budget_entries) + " residues");
        }
    }
    return static_cast<u64>(q);
}

}  // namespace

BigInt local_count_Mn(u64 p, int h, i64 n, Exec exec) {
    const u64 q = modulus_for(p, h, kDefaultLocalBudgetEntries);
    const std::vector<u128> qq = pair_square_counts(q, exec);
    const u64 nr = reduce_mod(n, q);
    mp::uint256_t acc = 0;
    for (u64 t = 0; t < q; ++t) {
        if (qq[t] == 0) continue;
        const u64 u = nr >= t ? nr - t : nr + q - t;
        acc += to_u256(qq[t]) * to_u256(qq[u]);
    }
    return BigInt(acc);
}

std::vector<BigInt> local_count_all(u64 p, int h, Exec exec) {
    const u64 q = modulus_for(p, h, kDefaultLocalBudgetEntries);
    const std::vector<u128> qq = pair_square_counts(q, exec);
    std::vector<BigInt> out(q);
    try {
        const std::vector<u128> four = cyclic_convolve(qq, qq, exec);
        for (u64 t = 0; t < q; ++t) out[t] = to_big(four[t]);
    } catch (const CapacityError&) {
        for (u64 n = 0; n < q; ++n) {
            mp::uint256_t acc = 0;
            for (u64 t = 0; t < q; ++t) {
                const u64 u = n >= t ? n - t : n + q - t;
                acc += to_u256(qq[t]) * to_u256(qq[u]);
            }
            out[n] = BigInt(acc);
        }
    }
    return out;
}

EulerFactorEstimate sigma_p(u64 p, i64 n, int h_max, double tol, u64 budget_entries, Exec exec) {
    if (h_max < 1) throw ContractError("sigma_p: h_max must be positive");
    modulus_for(p, h_max, budget_entries);
    EulerFactorEstimate est;
    est.p = p;
    est.n = n;
    est.levels.push_back(1.0);
    for (int h = 1; h <= h_max; ++h) {
        const BigInt M = local_count_Mn(p, h, n, exec);
        const BigInt denom = mp::pow(BigInt(p), static_cast<unsigned>(11 * h));
        const double v = M.convert_to<double>() / denom.convert_to<double>();
        est.deltas.push_back(std::abs(v - est.levels.back()));
        est.levels.push_back(v);
    }
    est.h = h_max;
    est.value = est.levels.back();
    est.converged = est.deltas.back() < tol;
    if (p > 3 && reduce_mod(n, p) != 0) {
        est.lower_constant = std::max(0.0, (1.0 - est.value) * std::pow(static_cast<double>(p), 1.5));
    }
    return est;
}

// --- solubility --------------------------------------------------------

std::vector<u64> m33_set(u64 p, int h) {
    const u64 m = modulus_for(p, h, kDefaultLocalBudgetEntries);
    std::vector<char> unit_cube(m, 0), any_cube(m, 0);
    for (u64 x = 0; x < m; ++x) {
        const u64 c = mulmod(mulmod(x, x, m), x, m);
        any_cube[c] = 1;
        if (x % p != 0) unit_cube[c] = 1;
    }
    std::vector<u64> cubes;
    for (u64 r = 0; r < m; ++r) {
        if (any_cube[r]) cubes.push_back(r);
    }
    std::vector<char> two(m, 0);
    for (u64 a : cubes) {
        for (u64 b : cubes) two[(a + b) % m] = 1;
    }
    std::vector<char> three(m, 0);
    for (u64 u = 0; u < m; ++u) {
        if (!unit_cube[u]) continue;
        for (u64 s = 0; s < m; ++s) {
            if (two[s]) three[(u + s) % m] = 1;
        }
    }
    std::vector<u64> out;
    for (u64 r = 0; r < m; ++r) {
        if (three[r]) out.push_back(r);
    }
    return out;
}

PaperSets paper_sets_A_B() {
    PaperSets s;
    s.m33_27 = m33_set(3, 3);
    std::set<u64> A, B, AB;
    for (u64 x : s.m33_27) A.insert(x * x % 27);
    for (u64 y : A) {
        if (y % 3 != 0) B.insert(y);
    }
    for (u64 a : A) {
        for (u64 b : B) AB.insert((a + b) % 27);
    }
    s.A.assign(A.begin(), A.end());
    s.B.assign(B.begin(), B.end());
    s.AplusB.assign(AB.begin(), AB.end());

    const std::vector<u64> expect_A{0, 1, 4, 9, 10, 13, 19, 22};
    const std::vector<u64> expect_AB{1, 2, 4, 5, 8, 10, 11, 13, 14, 17, 19, 20, 22, 23, 26};
    std::vector<u64> expect_m33;
    for (u64 t = 0; t < 27; ++t) {
        if (t % 9 != 4 && t % 9 != 5) expect_m33.push_back(t);
    }
    if (s.A != expect_A) throw VerificationError("reference sets: A does not match {0,1,4,9,10,13,19,22}");
    if (s.AplusB != expect_AB) throw VerificationError("reference sets: A+B does not match the expected set");
    if (s.m33_27 != expect_m33) throw VerificationError("reference sets: M33(27) is not the residues outside 4,5 mod 9");
    return s;
}

namespace {

u64 T_mod(u64 a, u64 b, u64 c, u64 m) {
    auto cb = [m](u64 x) { return mulmod(mulmod(x, x, m), x, m); };
    return (cb(a) + cb(b) + cb(c)) % m;
}

// Search y in [1,m]^12 with sum T(y_i)^2 = n mod m, p !| y_{1,1}, p !| T(y_1).
bool find_witness(u64 p, u64 m, u64 nr, std::array<u64, 12>& w) {
    // cube_rep[r] = some x in [1, m] with x^3 = r mod m (0 if none).
    std::vector<u64> cube_rep(m, 0), unit_rep(m, 0);
    for (u64 x = m; x >= 1; --x) {
        const u64 c = mulmod(mulmod(x, x, m), x, m);
        cube_rep[c] = x;
        if (x % p != 0) unit_rep[c] = x;
    }
    // two_rep[s] = (x2, x3) with x2^3 + x3^3 = s.
    std::vector<std::pair<u64, u64>> two_rep(m, {0, 0});
    for (u64 r1 = 0; r1 < m; ++r1) {
        if (!cube_rep[r1]) continue;
        for (u64 r2 = 0; r2 < m; ++r2) {
            if (!cube_rep[r2]) continue;
            auto& slot = two_rep[(r1 + r2) % m];
            if (!slot.first) slot = {cube_rep[r1], cube_rep[r2]};
        }
    }
    // Any triple per residue of T, and a constrained triple for y_1.
    std::vector<std::array<u64, 3>> any_rep(m, {0, 0, 0}), good_rep(m, {0, 0, 0});
    for (u64 r1 = 0; r1 < m; ++r1) {
        for (u64 s = 0; s < m; ++s) {
            if (!two_rep[s].first) continue;
            const u64 t = (r1 + s) % m;
            if (cube_rep[r1] && !any_rep[t][0]) any_rep[t] = {cube_rep[r1], two_rep[s].first, two_rep[s].second};
            if (unit_rep[r1] && t % p != 0 && !good_rep[t][0]) {
                good_rep[t] = {unit_rep[r1], two_rep[s].first, two_rep[s].second};
            }
        }
    }
    // pair_sq[s] = (u3, u4) residues of T with u3^2 + u4^2 = s.
    std::vector<std::pair<i64, i64>> pair_sq(m, {-1, -1});
    for (u64 u3 = 0; u3 < m; ++u3) {
        if (!any_rep[u3][0]) continue;
        for (u64 u4 = 0; u4 < m; ++u4) {
            if (!any_rep[u4][0]) continue;
            auto& slot = pair_sq[(mulmod(u3, u3, m) + mulmod(u4, u4, m)) % m];
            if (slot.first < 0) slot = {static_cast<i64>(u3), static_cast<i64>(u4)};
        }
    }
    for (u64 u1 = 0; u1 < m; ++u1) {
        if (!good_rep[u1][0]) continue;
        for (u64 u2 = 0; u2 < m; ++u2) {
            if (!any_rep[u2][0]) continue;
            const u64 used = (mulmod(u1, u1, m) + mulmod(u2, u2, m)) % m;
            const u64 rest = (nr + m - used) % m;
            if (pair_sq[rest].first < 0) continue;
            const auto [u3, u4] = pair_sq[rest];
            const std::array<const std::array<u64, 3>*, 4> trip{&good_rep[u1], &any_rep[u2],
                                                                 &any_rep[static_cast<u64>(u3)],
                                                                 &any_rep[static_cast<u64>(u4)]};
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 3; ++j) w[static_cast<std::size_t>(3 * i + j)] = (*trip[i])[j];
            }
            return true;
        }
    }
    return false;
}

bool verify_witness(u64 p, u64 m, u64 nr, const std::array<u64, 12>& w) {
    u64 sum = 0;
    for (int i = 0; i < 4; ++i) {
        const u64 t = T_mod(w[3 * i], w[3 * i + 1], w[3 * i + 2], m);
        sum = (sum + mulmod(t, t, m)) % m;
    }
    const u64 t1 = T_mod(w[0], w[1], w[2], m);
    return sum == nr && w[0] % p != 0 && t1 % p != 0;
}

}  // namespace

HenselCertificate hensel_certificate(u64 p, i64 n) {
    if (!is_prime(p)) throw ContractError("hensel_certificate: p must be prime");
    HenselCertificate c;
    c.p = p;
    c.n = n;
    if (p == 2) {
        c.modulus = 8;
        if (reduce_mod(n, 8) == 0) {
            // 8 | n forces every T(y_i) even, so the unit condition cannot hold;
            // solubility is certified by two_adic_profile instead.
            c.branch = "two-adic";
            return c;
        }
        c.branch = "mod-8";
    } else if (p == 3) {
        c.modulus = 27;
        c.branch = "mod-27";
    } else {
        c.modulus = p;
        c.branch = "generic";
    }
    const u64 nr = reduce_mod(n, c.modulus);
    c.found = find_witness(p, c.modulus, nr, c.witness);
    if (!c.found) {
        if (p >= 5) {
            throw VerificationError("hensel_certificate: no nonsingular witness mod " + std::to_string(p) +
                                    " for n = " + std::to_string(n));
        }
        return c;
    }
    c.condition_checked = verify_witness(p, c.modulus, nr, c.witness);
    if (!c.condition_checked) throw VerificationError("hensel_certificate: witness failed re-verification");
    return c;
}

namespace {

// Odd x with x^2 = a mod 2^k, for a = 1 mod 8 (any k) or a = 1 mod 2^k (k <= 3).
u64 sqrt_mod_pow2(u64 a, int k) {
    const u64 mask = k >= 64 ? ~u64{0} : (u64{1} << k) - 1;
    a &= mask;
    if (k <= 3) {
        for (u64 x = 1; x <= mask; x += 2) {
            if (((x * x) & mask) == a) return x;
        }
        throw VerificationError("sqrt_mod_pow2: no odd root");
    }
    u64 x = 1;
    for (int i = 3; i < k; ++i) {
        const u64 m = (u64{1} << (i + 1)) - 1;
        if (((x * x - a) & m) != 0) x += u64{1} << (i - 1);
    }
    if (((x * x) & mask) != a) throw VerificationError("sqrt_mod_pow2: lifting failed");
    return x & mask;
}

}  // namespace

TwoAdicProfile two_adic_profile(u64 n, int h, u64 budget_entries) {
    if (n < 1) throw ContractError("two_adic_profile: n must be positive");
    if (h < 1 || h > 60) throw ContractError("two_adic_profile: h must lie in [1, 60]");
    TwoAdicProfile prof;
    prof.n = n;
    prof.h = h;
    prof.gamma = two_adic_valuation(n);
    prof.theta = prof.gamma >= 1 ? (prof.gamma - 1) / 2 : 0;
    if (prof.gamma >= 3 && h < prof.gamma + 2) {
        throw ContractError("two_adic_profile: need h >= gamma + 2 when gamma >= 3");
    }

    // Solve y1^2 + y2^2 + y3^2 + y4^2 = n / 4^theta mod 2^(h - 2 theta), y1 odd.
    const int k = h - 2 * prof.theta;
    const u64 mod_h = u64{1} << h;
    const u64 target = (n >> (2 * prof.theta));
    bool found = false;
    std::array<u64, 4> y{};
    for (u64 a = 0; a < 8 && !found; ++a) {
        for (u64 b = 0; b < 8 && !found; ++b) {
            for (u64 c = 0; c < 8 && !found; ++c) {
                const u64 mk = k >= 64 ? ~u64{0} : (u64{1} << k) - 1;
                const u64 rest = (target - a * a - b * b - c * c) & mk;
                const bool ok = k >= 3 ? (rest & 7) == 1 : (rest & mk) == (1 & mk);
                if (!ok) continue;
                y = {sqrt_mod_pow2(rest, k), a, b, c};
                found = true;
            }
        }
    }
    if (found) {
        u64 sum = 0;
        for (int i = 0; i < 4; ++i) {
            prof.x[i] = (y[i] << prof.theta) & (mod_h - 1);
            sum = (sum + prof.x[i] * prof.x[i]) & (mod_h - 1);
        }
        prof.solution_checked = sum == (n & (mod_h - 1)) && (y[0] & 1) == 1;
    }

    if (prof.gamma <= 2) {
        prof.lower_bound = std::ldexp(1.0, -33);
        prof.count_exponent = 11 * h - 33;
    } else {
        prof.lower_bound = std::ldexp(1.0, -prof.gamma - 16);
        prof.count_exponent = 11 * h - prof.gamma - 16;
    }
    if (mod_h <= budget_entries) {
        prof.count = local_count_Mn(2, h, static_cast<i64>(n & (mod_h - 1)));
        prof.count_bound_holds = *prof.count >= mp::pow(BigInt(2), static_cast<unsigned>(std::max(0, prof.count_exponent)));
    }
    return prof;
}

// --- majorant -----------------------------------------------------------

u128 w2_inverse_sixth(u64 q) {
    if (q < 1) throw ContractError("w2: q must be positive");
    u128 w = 1;
    for (const auto& [p, k] : factorize(q)) {
        const int e = k >= 6 ? k : (k >= 2 ? 6 : 3);
        for (int i = 0; i < e; ++i) w *= p;
    }
    return w;
}

double w2(u64 q) {
    double v = 1.0;
    for (const auto& [p, k] : factorize(q)) {
        const double pd = static_cast<double>(p);
        if (k >= 7) {
            const int u = (k - 1) / 6;
            const int vv = k - 6 * u;
            v *= std::pow(pd, -u - vv / 6.0);
        } else if (k >= 2) {
            v /= pd;
        } else {
            v /= std::sqrt(pd);
        }
    }
    return v;
}

bool w2_is_tight(u64 q) { return w2_inverse_sixth(q) == static_cast<u128>(q); }

// --- diagnostics --------------------------------------------------------

double scaled_sum_sup(u64 Qmax, Exec exec) {
    std::vector<double> best(Qmax + 1, 0.0);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
    for (std::ptrdiff_t qi = 1; qi <= static_cast<std::ptrdiff_t>(Qmax); ++qi) {
        const u64 q = static_cast<u64>(qi);
        const std::vector<cplx> t = complete_sum_table(q, Exec::serial);
        double m = 0.0;
        for (u64 a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            m = std::max(m, std::abs(t[a]) / std::pow(static_cast<double>(q), 2.5));
        }
        best[q] = m;
    }
    return *std::max_element(best.begin(), best.end());
}

double gauss_refinement_constant(u64 pmax, Exec exec) {
    const std::vector<u64> primes = primes_up_to(pmax);
    std::vector<double> best(primes.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(primes.size()); ++i) {
        const u64 p = primes[static_cast<std::size_t>(i)];
        if (p < 5) continue;
        const std::vector<cplx> t = complete_sum_table(p, Exec::serial);
        const double p2 = static_cast<double>(p) * static_cast<double>(p);
        double m = 0.0;
        for (u64 a = 1; a < p; ++a) {
            m = std::max(m, std::abs(t[a] - p2 * gauss_sum_S2(p, static_cast<i64>(a))) / p2);
        }
        best[static_cast<std::size_t>(i)] = m;
    }
    return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

}  // namespace cubesq
