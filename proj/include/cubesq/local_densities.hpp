// local_densities.hpp
//
// Modular side of the problem n = T(y1)^2 + T(y2)^2 + T(y3)^2 + T(y4)^2:
//
//   S(q,a)    = sum_{r in [1,q]^3} e_q(a T(r)^2)          complete sum
//   S2(q,a)   = sum_{r=1}^{q} e_q(a r^2)                   quadratic Gauss sum
//   S_n(q)    = sum_{(a,q)=1} (q^-3 S(q,a))^4 e_q(-n a)    series coefficient
//   M_n(p^h)  = #{Y in [1,p^h]^12 : sum T(y_i)^2 = n mod p^h}
//   sigma(p)  = lim p^{-11h} M_n(p^h) = sum_l S_n(p^l)
//
// Every exponential sum is evaluated through a residue distribution: the
// counts of T(r) mod q over r in [1,q]^3 are the triple cyclic convolution of
// the cube residue counts, so S(q,a) costs O(q) once the distribution exists.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cubesq/convolution.hpp"
#include "cubesq/core.hpp"

namespace cubesq {

using BigInt = boost::multiprecision::cpp_int;

struct ResidueDistribution {
    u64 q = 1;
    std::vector<u128> counts;  // length q

    u128 total() const;
};

// counts[t] = #{1 <= r <= q : r^3 = t mod q}.
ResidueDistribution cube_residue_counts(u64 q);

// counts[t] = #{r in [1,q]^3 : T(r) = t mod q}; total q^3.
ResidueDistribution t_distribution(u64 q, Exec exec = Exec::parallel,
                                   ConvMethod method = ConvMethod::automatic);

// out[t] = sum over s with s^2 = t mod q of d[s].
ResidueDistribution square_map(const ResidueDistribution& d);

// --- exponential sums ---------------------------------------------------

cplx complete_sum_S(u64 q, i64 a);
cplx complete_sum_S(const ResidueDistribution& tdist, i64 a);

// S(q,a) for every a in [0, q). Parallel over a, fixed reduction order per a.
std::vector<cplx> complete_sum_table(u64 q, Exec exec = Exec::parallel);

// Requires gcd(a, q) = 1 (ContractError otherwise).
cplx gauss_sum_S2(u64 q, i64 a);

// (q^-3 S(q,a))^4 for every a coprime to q; the ingredient of S_n(q) for all n.
struct FourthPowers {
    u64 q = 1;
    std::vector<u64> a;
    std::vector<cplx> value;
};
FourthPowers fourth_powers(u64 q, Exec exec = Exec::parallel);

cplx coefficient_Sn_complex(const FourthPowers& fp, i64 n);
cplx coefficient_Sn_complex(u64 q, i64 n);
// Real part of S_n(q); throws VerificationError when |Im| >= 1e-8.
double coefficient_Sn(u64 q, i64 n);

enum class SeriesMethod { multiplicative, direct };

struct DyadicTail {
    u64 lo = 0, hi = 0;  // sum over lo < q <= hi
    double abs_sum = 0;
};

struct SeriesResult {
    i64 n = 0;
    u64 Q = 0;
    double value = 0;                // sum_{q <= Q} S_n(q)
    std::vector<double> terms;       // terms[q] = S_n(q), index 0 unused
    std::vector<DyadicTail> tails;   // (Q/2, Q], (Q/4, Q/2], ...
};

SeriesResult truncated_singular_series(i64 n, u64 Q, SeriesMethod method = SeriesMethod::multiplicative,
                                       Exec exec = Exec::parallel);

// Sum of |S_n(q)| over lo < q <= hi, using the terms of a computed series.
double dyadic_tail(const SeriesResult& s, u64 lo, u64 hi);

// --- local counts -------------------------------------------------------

// Residues mod p^h available to the budget: p^h entries of u128 several times.
inline constexpr u64 kDefaultLocalBudgetEntries = 1'000'000;

BigInt local_count_Mn(u64 p, int h, i64 n, Exec exec = Exec::parallel);
// All residue classes at once; used for totals and small moduli.
std::vector<BigInt> local_count_all(u64 p, int h, Exec exec = Exec::parallel);

struct EulerFactorEstimate {
    u64 p = 0;
    i64 n = 0;
    int h = 0;                    // deepest level computed
    double value = 0;             // p^{-11h} M_n(p^h) at h
    std::vector<double> levels;   // levels[k] = p^{-11k} M_n(p^k), levels[0] = 1
    std::vector<double> deltas;   // |levels[k] - levels[k-1]|, k >= 1
    bool converged = false;       // last delta < tol
    // For p > 3 with p not dividing n: (1 - value) * p^{3/2}, the smallest C
    // with value >= 1 - C p^{-3/2}. Empty otherwise.
    std::optional<double> lower_constant;
};

EulerFactorEstimate sigma_p(u64 p, i64 n, int h_max = 3, double tol = 1e-4,
                            u64 budget_entries = kDefaultLocalBudgetEntries, Exec exec = Exec::parallel);

// --- solubility --------------------------------------------------------

// {T(x) mod p^h : x in (Z/p^h)^3, p does not divide x1}, ascending.
std::vector<u64> m33_set(u64 p, int h);

struct PaperSets {
    std::vector<u64> A, B, AplusB, m33_27;
};

// A = {x^2 mod 27 : x in M33(27)}, B = {y in A : 3 does not divide y}, A + B
// mod 27. Throws VerificationError unless all three match the expected sets.
PaperSets paper_sets_A_B();

struct HenselCertificate {
    u64 p = 0;
    i64 n = 0;
    u64 modulus = 0;                // p for p >= 5, 27 for p = 3, 8 for p = 2
    std::array<u64, 12> witness{};  // y_{i,j} in [1, modulus]
    bool found = false;
    bool condition_checked = false;  // p !| y_{1,1} and p !| T(y_1), re-verified
    std::string branch;              // "generic", "mod-27", "mod-8", "two-adic"
};

// Throws VerificationError for p >= 5 when no witness exists.
HenselCertificate hensel_certificate(u64 p, i64 n);

struct TwoAdicProfile {
    u64 n = 0;
    int gamma = 0;
    int theta = 0;
    int h = 0;
    std::array<u64, 4> x{};  // x_i = 2^theta y_i, y_1 odd, sum x_i^2 = n mod 2^h
    bool solution_checked = false;
    double lower_bound = 0;        // certified sigma(2) lower bound shape
    int count_exponent = 0;        // M_n(2^h) >= 2^count_exponent when gamma >= 3
    std::optional<BigInt> count;   // exact M_n(2^h) when 2^h fits the budget
    std::optional<bool> count_bound_holds;
};

TwoAdicProfile two_adic_profile(u64 n, int h, u64 budget_entries = kDefaultLocalBudgetEntries);

// --- majorant -----------------------------------------------------------

// w2(q)^{-6}, an exact integer: p^k for k >= 6 parts, p^6 for 2 <= k <= 5,
// p^3 for k = 1, multiplied over the prime powers of q.
u128 w2_inverse_sixth(u64 q);
double w2(u64 q);
// True when w2(q) = q^{-1/6}, i.e. w2_inverse_sixth(q) == q.
bool w2_is_tight(u64 q);

// --- diagnostics --------------------------------------------------------

// max over 1 <= q <= Qmax, (a,q) = 1 of |S(q,a)| / q^{5/2}.
double scaled_sum_sup(u64 Qmax, Exec exec = Exec::parallel);
// max over primes 5 <= p <= pmax and (a,p) = 1 of |S(p,a) - p^2 S2(p,a)| / p^2.
double gauss_refinement_constant(u64 pmax, Exec exec = Exec::parallel);

}  // namespace cubesq
