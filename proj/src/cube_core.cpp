#include "cubesq/cube_core.hpp"

#include <algorithm>
#include <cmath>

#include "cubesq/numtheory.hpp"

namespace cubesq {

namespace {

Params fill_params(u128 N, u64 P, double eta, std::optional<u64> R_override) {
    if (!(eta > 0.0 && eta < 1.0)) throw ContractError("eta must lie in (0, 1)");
    if (P < 2) throw DegenerateError("parameters degenerate: P = floor(N^(1/6)) must be at least 2");
    Params prm;
    prm.N = N;
    prm.P = P;
    prm.eta = eta;
    const double Pd = static_cast<double>(P);
    prm.M = std::pow(Pd, 0.4);
    prm.H = std::pow(Pd, 1.8);
    prm.H1 = std::cbrt(prm.H / 2.0);
    prm.H2 = std::cbrt(2.0 * prm.H / 3.0);
    prm.H3 = std::cbrt(prm.H / 6.0);
    if (R_override) {
        if (*R_override < 2) throw ContractError("smoothness bound R must be at least 2");
        prm.R = *R_override;
    } else {
        prm.R = std::max<u64>(2, static_cast<u64>(std::ceil(std::pow(Pd, eta))));
    }
    prm.c_eta = estimate_c_eta(P, prm.R);
    return prm;
}

}  // namespace

Params derive_params(u64 N, double eta, std::optional<u64> R_override) {
    if (N < 64) throw DegenerateError("parameters degenerate: N must be at least 64 so that P >= 2");
    return fill_params(N, sixth_root_floor(N), eta, R_override);
}

Params params_from_P(u64 P, double eta, std::optional<u64> R_override) {
    u128 N = 1;
    for (int i = 0; i < 6; ++i) {
        if (N > (~static_cast<u128>(0)) / P) throw CapacityError("params_from_P: P^6 exceeds 128 bits");
        N *= P;
    }
    return fill_params(N, P, eta, R_override);
}

u64 h_first_count(const Params& prm) { return prm.P - prm.P / 2; }

u64 w_first_count(const Params& prm) {
    const auto hi = static_cast<u64>(std::floor(prm.H2));
    const auto lo = static_cast<u64>(std::floor(prm.H1));
    return hi > lo ? hi - lo : 0;
}

// --- smooth numbers -----------------------------------------------------

bool SmoothSet::contains(u64 n) const { return std::binary_search(members.begin(), members.end(), n); }

namespace {

// Block sieve: divide each n in [lo, hi) by every prime <= R; n is smooth iff
// the cofactor ends at 1.
void smooth_block(u64 lo, u64 hi, const std::vector<u64>& primes, std::vector<std::uint8_t>& out) {
    std::vector<u64> rem(hi - lo);
    for (u64 n = lo; n < hi; ++n) rem[n - lo] = n;
    for (u64 p : primes) {
        u64 first = (lo + p - 1) / p * p;
        for (u64 m = first; m < hi; m += p) {
            u64& r = rem[m - lo];
            do {
                r /= p;
            } while (r % p == 0);
        }
    }
    for (u64 n = lo; n < hi; ++n) out[n - 1] = rem[n - lo] == 1;
}

}  // namespace

SmoothSet enumerate_smooth(u64 Y, u64 R, Exec exec) {
    if (Y < 1) throw ContractError("enumerate_smooth: Y must be at least 1");
    if (R < 2) throw ContractError("enumerate_smooth: R must be at least 2");
    MemoryBudget::require(Y, 9, "smooth-number sieve");
    SmoothSet s{Y, R, {}};
    std::vector<std::uint8_t> flag(Y, 0);
    const std::vector<u64> primes = primes_up_to(std::min(R, Y));
    if (exec == Exec::serial) {
        // Reference path: trial division of each n.
        for (u64 n = 1; n <= Y; ++n) {
            u64 r = n;
            for (u64 p : primes) {
                if (p * p > r) break;
                while (r % p == 0) r /= p;
            }
            flag[n - 1] = r <= R;
        }
    } else {
        const u64 block = 1 << 16;
        const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((Y + block - 1) / block);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
            const u64 lo = 1 + static_cast<u64>(b) * block;
            const u64 hi = std::min(Y + 1, lo + block);
            smooth_block(lo, hi, primes, flag);
        }
    }
    for (u64 n = 1; n <= Y; ++n) {
        if (flag[n - 1]) s.members.push_back(n);
    }
    return s;
}

double estimate_c_eta(u64 P, u64 R) {
    if (P < 1) throw ContractError("estimate_c_eta: P must be positive");
    return static_cast<double>(enumerate_smooth(P, R).size()) / static_cast<double>(P);
}

// --- sums of three cubes ------------------------------------------------

CubeSumSieve::CubeSumSieve(u64 limit, std::vector<u64> bits, std::vector<std::uint16_t> counts, bool saturated)
    : limit_(limit), bits_(std::move(bits)), counts_(std::move(counts)), saturated_(saturated) {}

bool CubeSumSieve::contains(u64 n) const {
    if (n == 0 || n > limit_) return false;
    return (bits_[n >> 6] >> (n & 63)) & 1u;
}

std::uint16_t CubeSumSieve::r3(u64 n) const {
    if (counts_.empty()) throw ContractError("CubeSumSieve::r3: sieve was built without counts");
    if (n == 0 || n > limit_) return 0;
    return counts_[n];
}

u64 CubeSumSieve::count() const {
    u64 c = 0;
    for (u64 w : bits_) c += static_cast<u64>(__builtin_popcountll(w));
    return c;
}

std::vector<u64> CubeSumSieve::members() const {
    std::vector<u64> out;
    for (u64 n = 1; n <= limit_; ++n) {
        if (contains(n)) out.push_back(n);
    }
    return out;
}

namespace {

inline u64 cube(u64 x) { return x * x * x; }

// Smallest x with x^3 >= v.
inline u64 icbrt_ceil(u64 v) {
    if (v == 0) return 0;
    u64 r = icbrt(v);
    return cube(r) == v ? r : r + 1;
}

inline void bump(std::vector<std::uint16_t>& counts, u64 n, unsigned add, bool& saturated) {
    unsigned v = counts[n] + add;
    if (v > 0xFFFFu) {
        v = 0xFFFFu;
        saturated = true;
    }
    counts[n] = static_cast<std::uint16_t>(v);
}

}  // namespace

CubeSumSieve sieve_cube_sums(u64 X, bool with_counts, Exec exec) {
    if (X < 1) throw ContractError("sieve_cube_sums: X must be at least 1");
    const std::size_t nwords = X / 64 + 1;
    MemoryBudget::require(nwords * 8 + (with_counts ? (X + 1) * 2 : 0), 1, "cube-sum sieve");
    std::vector<u64> bits(nwords, 0);
    std::vector<std::uint16_t> counts(with_counts ? X + 1 : 0, 0);
    bool saturated = false;
    const u64 top = icbrt(X);

    if (exec == Exec::serial) {
        for (u64 a = 1; a <= top; ++a) {
            for (u64 b = 1; b <= top; ++b) {
                const u64 ab = cube(a) + cube(b);
                if (ab >= X) break;
                for (u64 c = 1; c <= top; ++c) {
                    const u64 n = ab + cube(c);
                    if (n > X) break;
                    bits[n >> 6] |= u64{1} << (n & 63);
                    if (with_counts) bump(counts, n, 1, saturated);
                }
            }
        }
        return CubeSumSieve(X, std::move(bits), std::move(counts), saturated);
    }

    // Each block owns a word-aligned range of values; triples are enumerated
    // with x1 <= x2 <= x3 and weighted by their number of orderings.
    const u64 block = std::max<u64>(u64{1} << 16, (X / 256 + 63) / 64 * 64);
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((X + 1 + block - 1) / block);
    bool sat_any = false;
#pragma omp parallel for schedule(dynamic, 1) reduction(|| : sat_any)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const u64 lo = static_cast<u64>(bi) * block;
        const u64 hi = std::min<u64>(X + 1, lo + block);  // values in [lo, hi)
        bool sat = false;
        for (u64 x3 = std::max<u64>(1, icbrt_ceil((lo + 2) / 3)); x3 <= top && cube(x3) + 2 < hi; ++x3) {
            const u64 c3 = cube(x3);
            for (u64 x2 = 1; x2 <= x3; ++x2) {
                const u64 s = c3 + cube(x2);
                if (s + 1 >= hi) break;
                if (s + cube(x2) < lo) continue;
                const u64 x1_lo = std::max<u64>(1, lo > s ? icbrt_ceil(lo - s) : 1);
                const u64 x1_hi = std::min<u64>(x2, icbrt(hi - 1 - s));
                for (u64 x1 = x1_lo; x1 <= x1_hi; ++x1) {
                    const u64 n = s + cube(x1);
                    bits[n >> 6] |= u64{1} << (n & 63);
                    if (with_counts) {
                        const unsigned perms = (x1 == x3) ? 1 : (x1 == x2 || x2 == x3) ? 3 : 6;
                        bump(counts, n, perms, sat);
                    }
                }
            }
        }
        sat_any = sat_any || sat;
    }
    return CubeSumSieve(X, std::move(bits), std::move(counts), sat_any);
}

// --- weight tables ------------------------------------------------------

u64 WeightTable::total_mass() const {
    u64 s = 0;
    for (u64 m : multiplicity) s += m;
    return s;
}

u64 WeightTable::at(u64 value) const {
    auto it = std::lower_bound(support.begin(), support.end(), value);
    if (it == support.end() || *it != value) return 0;
    return multiplicity[static_cast<std::size_t>(it - support.begin())];
}

namespace {

struct Range {
    u64 first_lo = 0, first_hi = 0;  // y1 in [first_lo, first_hi]
    u64 smooth_limit = 0;             // y2, y3 in A(smooth_limit, R)
};

Range role_range(const Params& prm, Role role) {
    Range r;
    if (role == Role::a) {
        r.first_lo = prm.P / 2 + 1;
        r.first_hi = prm.P;
        r.smooth_limit = prm.P;
    } else {
        r.first_lo = static_cast<u64>(std::floor(prm.H1)) + 1;
        r.first_hi = static_cast<u64>(std::floor(prm.H2));
        r.smooth_limit = prm.H3 >= 1.0 ? static_cast<u64>(std::floor(prm.H3)) : 0;
    }
    return r;
}

}  // namespace

u64 expected_mass(const Params& prm, Role role) {
    const Range r = role_range(prm, role);
    if (r.smooth_limit == 0 || r.first_hi < r.first_lo) return 0;
    const u64 s = enumerate_smooth(r.smooth_limit, prm.R).size();
    return (r.first_hi - r.first_lo + 1) * s * s;
}

WeightTable build_weight_table(const Params& prm, Role role, Exec exec) {
    WeightTable table;
    table.role = role;
    const Range r = role_range(prm, role);
    if (r.smooth_limit == 0 || r.first_hi < r.first_lo) return table;

    const SmoothSet smooth = enumerate_smooth(r.smooth_limit, prm.R, exec);

    // Distribution of y2^3 + y3^3 over ordered smooth pairs.
    std::vector<u64> pair_sums;
    pair_sums.reserve(smooth.size() * smooth.size());
    for (u64 a : smooth.members) {
        for (u64 b : smooth.members) pair_sums.push_back(cube(a) + cube(b));
    }
    std::sort(pair_sums.begin(), pair_sums.end());
    std::vector<std::pair<u64, u64>> pairs;
    for (u64 v : pair_sums) {
        if (!pairs.empty() && pairs.back().first == v) {
            ++pairs.back().second;
        } else {
            pairs.emplace_back(v, 1);
        }
    }

    const u64 nfirst = r.first_hi - r.first_lo + 1;
    MemoryBudget::require(nfirst * pairs.size(), sizeof(std::pair<u64, u64>), "weight table staging");
    std::vector<std::pair<u64, u64>> all(nfirst * pairs.size());
    const std::size_t np = pairs.size();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nfirst); ++i) {
        const u64 c1 = cube(r.first_lo + static_cast<u64>(i));
        for (std::size_t j = 0; j < np; ++j) {
            all[static_cast<std::size_t>(i) * np + j] = {c1 + pairs[j].first, pairs[j].second};
        }
    }
    std::sort(all.begin(), all.end());
    for (const auto& [v, m] : all) {
        if (!table.support.empty() && table.support.back() == v) {
            table.multiplicity.back() += m;
        } else {
            table.support.push_back(v);
            table.multiplicity.push_back(m);
        }
    }
    return table;
}

}  // namespace cubesq
