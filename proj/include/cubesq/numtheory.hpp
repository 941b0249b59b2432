// numtheory.hpp
//
// Small elementary number theory helpers: prime lists, factorisation,
// modular arithmetic on 64-bit moduli, 2-adic valuation, and the exact
// phase reduction used by every exponential sum in the library.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cubesq/core.hpp"

namespace cubesq {

struct PrimePower {
    u64 p;
    int k;
};

std::vector<u64> primes_up_to(u64 limit);
std::vector<u64> primes_in(double lo, double hi);
bool is_prime(u64 n);
std::vector<PrimePower> factorize(u64 n);

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 b, u64 e, u64 m);
u64 ipow(u64 b, int e);  // throws CapacityError on overflow

// Exponent gamma with 2^gamma || n. Requires n != 0.
int two_adic_valuation(u64 n);

// Largest P with P^6 <= n.
u64 sixth_root_floor(u64 n);
u64 isqrt(u64 n);
u64 icbrt(u64 n);

// e(x) = exp(2 pi i x).
cplx expi(double x);

// Fractional part of alpha * k computed without rounding the product: alpha is
// split into its exact binary mantissa and exponent and the product is reduced
// mod 1 in 128-bit integer arithmetic. Requires k < 2^75.
double frac_mul(double alpha, u128 k);

// Kahan-compensated complex accumulator.
class KahanSum {
public:
    void add(cplx v);
    cplx value() const { return sum_; }

private:
    cplx sum_{0.0, 0.0};
    cplx comp_{0.0, 0.0};
};

}  // namespace cubesq
