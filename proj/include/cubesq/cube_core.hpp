// cube_core.hpp
//
// Ground sets built from cubes:
//   - the size parameters P, M, H, H1, H2, H3 derived from a target N,
//   - R-smooth integers A(Y, R),
//   - the set C of sums of three positive cubes (bitset sieve, optional r3),
//   - the weight tables a_x (triples in the set "H") and b_h (triples in "W").
//
// Two triple sets drive the weights:
//   H-set: P/2 < y1 <= P,  y2, y3 in A(P, R)
//   W-set: H1 < y1 <= H2,  y2, y3 in A(H3, R)
// and T(y) = y1^3 + y2^3 + y3^3.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubesq/core.hpp"

namespace cubesq {

struct Params {
    u128 N = 0;  // target size; P^6 <= N < (P+1)^6
    u64 P = 0;   // floor(N^(1/6))
    double M = 0, H = 0;
    double H1 = 0, H2 = 0, H3 = 0;
    double eta = 0;
    u64 R = 2;           // smoothness bound, >= 2
    double c_eta = 0;    // |A(P, R)| / P at this P
};

// Requires N >= 64 and 0 < eta < 1. R defaults to ceil(P^eta) clamped to >= 2.
Params derive_params(u64 N, double eta, std::optional<u64> R_override = std::nullopt);

// Same parameters starting from P directly (N := P^6). Lets P run past the
// 64-bit range of N. Requires P >= 2.
Params params_from_P(u64 P, double eta, std::optional<u64> R_override = std::nullopt);

// Number of integers y1 in the H-set range and in the W-set range.
u64 h_first_count(const Params& prm);
u64 w_first_count(const Params& prm);

// --- smooth numbers -----------------------------------------------------

struct SmoothSet {
    u64 Y = 0;
    u64 R = 0;
    std::vector<u64> members;  // ascending

    std::size_t size() const { return members.size(); }
    bool contains(u64 n) const;
};

SmoothSet enumerate_smooth(u64 Y, u64 R, Exec exec = Exec::parallel);

// |A(P, R)| / P.
double estimate_c_eta(u64 P, u64 R);

// --- sums of three positive cubes ----------------------------------------

class CubeSumSieve {
public:
    CubeSumSieve() = default;
    CubeSumSieve(u64 limit, std::vector<u64> bits, std::vector<std::uint16_t> counts, bool saturated);

    u64 limit() const { return limit_; }
    bool contains(u64 n) const;
    bool has_counts() const { return !counts_.empty(); }
    // Ordered-triple count r3(n); saturates at 65535 (see saturated()).
    std::uint16_t r3(u64 n) const;
    bool saturated() const { return saturated_; }
    u64 count() const;  // |C ∩ [1, limit]|
    std::vector<u64> members() const;
    const std::vector<u64>& bits() const { return bits_; }

private:
    u64 limit_ = 0;
    std::vector<u64> bits_;
    std::vector<std::uint16_t> counts_;
    bool saturated_ = false;
};

CubeSumSieve sieve_cube_sums(u64 X, bool with_counts, Exec exec = Exec::parallel);

// --- weight tables ------------------------------------------------------

enum class Role : char { a = 'a', b = 'b' };

struct WeightTable {
    Role role = Role::a;
    std::vector<u64> support;       // ascending values T(y)
    std::vector<u64> multiplicity;  // parallel to support, all > 0

    std::size_t size() const { return support.size(); }
    bool empty() const { return support.empty(); }
    u64 total_mass() const;
    u64 at(u64 value) const;  // 0 when value is not in the support
};

// Exact multiplicities of T over the H-set (role a) or W-set (role b).
WeightTable build_weight_table(const Params& prm, Role role, Exec exec = Exec::parallel);

// Closed-form sizes of the generating sets, |H-set| and |W-set|.
u64 expected_mass(const Params& prm, Role role);

}  // namespace cubesq
