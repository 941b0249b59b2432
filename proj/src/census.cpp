#include "cubesq/census.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "cubesq/local_densities.hpp"
#include "cubesq/numtheory.hpp"

namespace cubesq {

// --- bitsets -------------------------------------------------------------------

BitSet::BitSet(u64 limit) : limit_(limit) {
    MemoryBudget::require(limit / 64 + 1, sizeof(u64), "census bitset");
    words_.assign(limit / 64 + 1, 0);
}

u64 BitSet::count(u64 hi) const {
    hi = std::min(hi, limit_);
    const u64 last = hi >> 6;
    u64 c = 0;
    for (u64 w = 0; w < last; ++w) c += static_cast<u64>(std::popcount(words_[w]));
    const u64 rem = hi & 63;
    const u64 mask = rem == 63 ? ~u64{0} : ((u64{1} << (rem + 1)) - 1);
    return c + static_cast<u64>(std::popcount(words_[last] & mask));
}

namespace {

// dst words [wlo, whi) |= (src << shift) restricted to those words.
void or_shifted_words(std::vector<u64>& dst, const std::vector<u64>& src, u64 shift, u64 wlo, u64 whi) {
    const u64 ws = shift >> 6;
    const unsigned bs = static_cast<unsigned>(shift & 63);
    const u64 nsrc = src.size();
    for (u64 w = std::max(wlo, ws); w < whi; ++w) {
        const u64 k = w - ws;
        u64 v = k < nsrc ? src[k] << bs : 0;
        if (bs != 0 && k >= 1 && k - 1 < nsrc) v |= src[k - 1] >> (64 - bs);
        dst[w] |= v;
    }
}

void clip(BitSet& b) {
    const u64 rem = b.limit() & 63;
    if (rem != 63) b.words().back() &= (u64{1} << (rem + 1)) - 1;
}

}  // namespace

void or_shifted(BitSet& dst, const BitSet& src, u64 shift) {
    if (shift > dst.limit()) return;
    or_shifted_words(dst.words(), src.words(), shift, 0, dst.words().size());
    clip(dst);
}

BitSet sumset(const BitSet& S, const std::vector<u64>& shifts, Exec exec) {
    BitSet out(S.limit());
    if (exec == Exec::serial) {
        for (u64 t : shifts) or_shifted(out, S, t);
        return out;
    }
    const u64 nw = out.words().size();
    const u64 block = 2048;  // 16 KiB of destination per task
    const auto nblocks = static_cast<std::ptrdiff_t>((nw + block - 1) / block);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const u64 wlo = static_cast<u64>(b) * block;
        const u64 whi = std::min(nw, wlo + block);
        for (u64 t : shifts) {
            if (t > out.limit()) continue;
            or_shifted_words(out.words(), S.words(), t, wlo, whi);
        }
    }
    clip(out);
    return out;
}

// --- census ----------------------------------------------------------------------

Census::Census(u64 N, Exec exec) : N_(N) {
    if (N < 1) throw ContractError("census: N must be at least 1");
    const u64 root = isqrt(N);
    csums_ = sieve_cube_sums(root, false, exec);
    celems_ = csums_.members();

    std::vector<u64> shifts;
    for (u64 c : celems_) shifts.push_back(c * c);
    BitSet S1(N);
    for (u64 t : shifts) S1.set(t);
    S2_ = sumset(S1, shifts, exec);
    BitSet S3 = sumset(S2_, shifts, exec);
    S4_ = sumset(S3, shifts, exec);

    summary_.N = N;
    summary_.E_count = N - (S4_.count(N) - (S4_.test(0) ? 1 : 0));
    for (u64 n = 1; n <= N; ++n) {
        if (S4_.test(n)) continue;
        if (summary_.E_list.size() == kCensusListCap) {
            summary_.E_list_truncated = true;
            break;
        }
        summary_.E_list.push_back(n);
    }
    for (int k = 1; k <= 10; ++k) {
        const u64 t = N / 10 * static_cast<u64>(k) + (k == 10 ? N % 10 : 0);
        if (t == 0) continue;
        summary_.density_curve.emplace_back(t, t - S4_.count(t));
    }
    for (int e = 6; e < 64; e += 12) {
        const u64 n = u64{1} << e;
        if (n > N) break;
        if (representable(n)) throw VerificationError("census: 2^" + std::to_string(e) + " found representable");
        summary_.family_hits.push_back(n);
    }
}

bool Census::representable(u64 n) const {
    if (n < 1 || n > N_) throw ContractError("census: n outside [1, N]");
    return S4_.test(n);
}

std::optional<std::array<u64, 4>> Census::witness(u64 n) const {
    if (!representable(n)) return std::nullopt;
    const auto& c = celems_;
    auto in_C = [this](u64 x) { return x >= 1 && x <= csums_.limit() && csums_.contains(x); };
    for (std::size_t i = 0; i < c.size() && 4 * c[i] * c[i] <= n; ++i) {
        const u64 r1 = n - c[i] * c[i];
        for (std::size_t j = i; j < c.size() && 3 * c[j] * c[j] <= r1; ++j) {
            const u64 r2 = r1 - c[j] * c[j];
            if (!S2_.test(r2)) continue;
            for (std::size_t k = j; k < c.size() && 2 * c[k] * c[k] <= r2; ++k) {
                const u64 r3 = r2 - c[k] * c[k];
                const u64 x = isqrt(r3);
                if (x * x == r3 && x >= c[k] && in_C(x)) return std::array<u64, 4>{c[i], c[j], c[k], x};
            }
        }
    }
    throw VerificationError("census: no witness recovered for n = " + std::to_string(n));
}

std::vector<bool> census_bruteforce(u64 N) {
    const u64 root = isqrt(N);
    std::vector<bool> inC(root + 1, false);
    for (u64 a = 1; 3 * a * a * a <= root; ++a) {
        for (u64 b = a; a * a * a + 2 * b * b * b <= root; ++b) {
            for (u64 c = b; a * a * a + b * b * b + c * c * c <= root; ++c) inC[a * a * a + b * b * b + c * c * c] = true;
        }
    }
    std::vector<u64> C;
    for (u64 x = 1; x <= root; ++x) {
        if (inC[x]) C.push_back(x);
    }
    std::vector<bool> rep(N + 1, false);
    for (std::size_t i = 0; i < C.size(); ++i) {
        for (std::size_t j = i; j < C.size(); ++j) {
            for (std::size_t k = j; k < C.size(); ++k) {
                for (std::size_t l = k; l < C.size(); ++l) {
                    const u64 s = C[i] * C[i] + C[j] * C[j] + C[k] * C[k] + C[l] * C[l];
                    if (s > N) break;
                    rep[s] = true;
                }
            }
        }
    }
    return rep;
}

// --- the family 2^{6+12j} -------------------------------------------------------------

FamilyReport verify_obstruction_family(int j_max, const Census* census) {
    if (j_max < 0) throw ContractError("verify_obstruction_family: j_max must be nonnegative");
    FamilyReport rep;

    // A sum of four squares that is 0 mod 8 has every term even.
    rep.mod8_forces_even = true;
    for (u64 t = 0; t < 8 * 8 * 8 * 8; ++t) {
        const u64 x[4] = {t & 7, (t >> 3) & 7, (t >> 6) & 7, (t >> 9) & 7};
        const u64 s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        if (s % 8 == 0 && ((x[0] | x[1] | x[2] | x[3]) & 1)) rep.mod8_forces_even = false;
    }
    // 4 = 1 + 1 + 1 + 1 is its only representation by positive squares.
    int reps_of_4 = 0;
    bool only_ones = true;
    for (u64 a = 1; a <= 2; ++a)
        for (u64 b = 1; b <= 2; ++b)
            for (u64 c = 1; c <= 2; ++c)
                for (u64 d = 1; d <= 2; ++d)
                    if (a * a + b * b + c * c + d * d == 4) {
                        ++reps_of_4;
                        only_ones = only_ones && a == 1 && b == 1 && c == 1 && d == 1;
                    }
    const ResidueDistribution t9 = t_distribution(9, Exec::serial);
    const bool cubes_miss_4_5 = t9.counts[4] == 0 && t9.counts[5] == 0;

    rep.all_obstructed = rep.mod8_forces_even;
    for (int j = 0; j <= j_max; ++j) {
        FamilyMember m;
        m.j = j;
        m.exponent = 6 + 12 * j;
        m.n = m.exponent < 64 ? u64{1} << m.exponent : 0;
        // Each halving of the terms divides the sum by 4; 2^{exponent} reaches
        // 4 after (exponent - 2) / 2 steps, each legal while the sum is 0 mod 8.
        int e = m.exponent;
        int steps = 0;
        while (e >= 3) {
            e -= 2;
            ++steps;
        }
        m.descent_ok = rep.mod8_forces_even && e == 2 && steps == 2 + 6 * j && reps_of_4 == 1 && only_ones;
        // Then x_i = 2^{steps}, and 2^{2+6j} = 4 * 64^j = 4 mod 9.
        m.mod9_ok = powmod(2, static_cast<u64>(steps), 9) == 4 && cubes_miss_4_5;
        if (census && m.n != 0 && m.n <= census->N()) {
            m.census_checked = true;
            m.census_agrees = !census->representable(m.n);
        }
        rep.all_obstructed = rep.all_obstructed && m.descent_ok && m.mod9_ok && (!m.census_checked || m.census_agrees);
        rep.members.push_back(m);
    }
    return rep;
}

u64 family_count(u64 N) {
    u64 c = 0;
    for (int e = 6; e < 64; e += 12) {
        if ((u64{1} << e) <= N) ++c;
    }
    return c;
}

u64 family_count_formula(u64 N) {
    if (N < 64) return 0;
    return static_cast<u64>(std::floor((std::log2(static_cast<double>(N)) - 6.0) / 12.0)) + 1;
}

// --- A_upsilon ---------------------------------------------------------------------------

UpsilonFilter filter_A_upsilon(u64 N, double upsilon) {
    if (!(upsilon > 0)) throw ContractError("filter_A_upsilon: upsilon must be positive");
    if (N < 1) throw ContractError("filter_A_upsilon: N must be at least 1");
    UpsilonFilter f;
    f.N = N;
    f.upsilon = upsilon;
    const double L = std::log(static_cast<double>(N));
    f.threshold = std::pow(L, upsilon);
    int k = 0;
    while (k < 64 && std::ldexp(1.0, k) < f.threshold) ++k;
    f.min_gamma = k;
    f.count = k < 64 ? N >> k : 0;
    if (k < 64) {
        const u64 step = u64{1} << k;
        for (u64 n = step; n <= N && f.members.size() < kCensusListCap; n += step) {
            f.members.push_back(n);
            if (n > N - step) break;
        }
    }
    f.bound = static_cast<double>(N) / f.threshold + 1.0;
    f.bound_holds = static_cast<double>(f.count) <= f.bound;
    return f;
}

// --- output ---------------------------------------------------------------------------------

void write_summary_json(std::ostream& os, const CensusSummary& s, const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["N"] = s.N;
    j["E_count"] = s.E_count;
    j["family_hits"] = s.family_hits;
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [t, c] : s.density_curve) curve.push_back({t, c});
    j["density_curve"] = curve;
    j["E_list"] = s.E_list;
    j["E_list_truncated"] = s.E_list_truncated;
    j["log_convention"] = "natural";
    j["config_hash"] = config_hash;
    j["version"] = CUBESQ_VERSION;
    os << j.dump(2) << '\n';
}

void write_witness_csv(std::ostream& os, const Census& c, const std::vector<u64>& ns) {
    os << "n,c1,c2,c3,c4\n";
    for (u64 n : ns) {
        const auto w = c.witness(n);
        if (!w) continue;
        os << n << ',' << (*w)[0] << ',' << (*w)[1] << ',' << (*w)[2] << ',' << (*w)[3] << '\n';
    }
}

}  // namespace cubesq
