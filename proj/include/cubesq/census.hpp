// census.hpp
//
// Exceptional set E(N): the n <= N that are not x1^2 + x2^2 + x3^2 + x4^2
// with every x_i a sum of three positive cubes (the set C).
//
// The decision pass is a chain of boolean sumsets over bitsets:
//   S1 = {c^2 : c in C, c^2 <= N},  S_{k+1} = S_k + S1 (clipped at N),
// and n is representable iff n is in S4. Witnesses are recovered on demand.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cubesq/cube_core.hpp"
#include "cubesq/core.hpp"

namespace cubesq {

inline constexpr std::size_t kCensusListCap = 100'000;

// Fixed-size bitset over [0, limit].
class BitSet {
public:
    BitSet() = default;
    explicit BitSet(u64 limit);

    u64 limit() const { return limit_; }
    bool test(u64 i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(u64 i) { words_[i >> 6] |= u64{1} << (i & 63); }
    u64 count(u64 hi) const;  // population count over [0, hi]
    const std::vector<u64>& words() const { return words_; }
    std::vector<u64>& words() { return words_; }

private:
    u64 limit_ = 0;
    std::vector<u64> words_;
};

// dst |= src shifted up by `shift`, clipped at dst.limit().
void or_shifted(BitSet& dst, const BitSet& src, u64 shift);

// S + {t : t in shifts}, clipped at the limit. The parallel body gives each
// thread a disjoint block of destination words.
BitSet sumset(const BitSet& S, const std::vector<u64>& shifts, Exec exec = Exec::parallel);

struct CensusSummary {
    u64 N = 0;
    u64 E_count = 0;
    std::vector<u64> E_list;   // ascending, at most kCensusListCap entries
    bool E_list_truncated = false;
    std::vector<u64> family_hits;  // members of {2^{6+12j}} up to N, all in E
    std::vector<std::pair<u64, u64>> density_curve;  // (t, |E(t)|) at t = kN/10
};

class Census {
public:
    Census(u64 N, Exec exec = Exec::parallel);

    u64 N() const { return N_; }
    bool representable(u64 n) const;  // n in [1, N]
    const CensusSummary& summary() const { return summary_; }
    const CubeSumSieve& cube_sums() const { return csums_; }
    // Elements of C up to sqrt(N), ascending.
    const std::vector<u64>& c_elements() const { return celems_; }

    // (c1, c2, c3, c4) with c1 <= c2 <= c3 <= c4 and sum c_i^2 = n, smallest
    // c1 first. Empty when n is in E.
    std::optional<std::array<u64, 4>> witness(u64 n) const;

private:
    u64 N_;
    CubeSumSieve csums_;
    std::vector<u64> celems_;
    BitSet S2_, S4_;
    CensusSummary summary_;
};

// The same decision by a plain loop over c1 <= c2 <= c3 <= c4. Reference for
// the tests; O(|C|^4).
std::vector<bool> census_bruteforce(u64 N);

// --- the family n = 2^{6+12j} --------------------------------------------------

struct FamilyMember {
    int j = 0;
    u64 n = 0;  // 0 when 2^{6+12j} does not fit 64 bits
    int exponent = 0;
    bool descent_ok = false;      // 4 | every term, dividing out 4 repeatedly ends at 4 = 1+1+1+1
    bool mod9_ok = false;         // 2^{2+6j} = 4 mod 9, and no sum of three cubes is 4 or 5 mod 9
    bool census_checked = false;  // n was in the census range
    bool census_agrees = false;
};

struct FamilyReport {
    std::vector<FamilyMember> members;
    bool mod8_forces_even = false;  // x1^2+..+x4^2 = 0 mod 8 forces every x_i even
    bool all_obstructed = false;
};

// Checks every j <= j_max by modular descent; when a census is given, also
// compares with its decision.
FamilyReport verify_obstruction_family(int j_max, const Census* census = nullptr);

// #{j >= 0 : 2^{6+12j} <= N} computed by integer arithmetic.
u64 family_count(u64 N);
// floor((log2 N - 6) / 12) + 1 in floating point, 0 below 64.
u64 family_count_formula(u64 N);

// --- A_upsilon ----------------------------------------------------------------------

struct UpsilonFilter {
    u64 N = 0;
    double upsilon = 0;
    double threshold = 0;  // (ln N)^upsilon
    int min_gamma = 0;     // smallest gamma with 2^gamma >= threshold
    u64 count = 0;         // #{n <= N : 2^gamma(n) >= threshold}
    std::vector<u64> members;  // first entries, at most kCensusListCap
    double bound = 0;      // N (ln N)^{-upsilon} + 1
    bool bound_holds = false;
};

UpsilonFilter filter_A_upsilon(u64 N, double upsilon);

// --- output -----------------------------------------------------------------------------

void write_summary_json(std::ostream& os, const CensusSummary& s, const std::string& config_hash);
void write_witness_csv(std::ostream& os, const Census& c, const std::vector<u64>& ns);

}  // namespace cubesq
