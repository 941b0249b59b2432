#include <doctest.h>

#include <cmath>
#include <random>

#include "cubesq/numtheory.hpp"

using namespace cubesq;

namespace {

bool prime_by_trial(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("prime lists agree with trial division") {
    const auto ps = primes_up_to(5000);
    std::size_t k = 0;
    for (u64 n = 0; n <= 5000; ++n) {
        const bool is = k < ps.size() && ps[k] == n;
        CHECK(is == prime_by_trial(n));
        CHECK(is_prime(n) == prime_by_trial(n));
        if (is) ++k;
    }
    CHECK(primes_in(0.87, 1.74).empty());
    CHECK(primes_in(1.15, 2.3) == std::vector<u64>{2});
    CHECK(primes_in(1.5, 3.03) == std::vector<u64>{2, 3});
}

TEST_CASE("factorize reconstructs n") {
    for (u64 n = 1; n < 20000; ++n) {
        u64 prod = 1;
        u64 last = 0;
        for (const auto& [p, k] : factorize(n)) {
            CHECK(prime_by_trial(p));
            CHECK(p > last);
            last = p;
            for (int i = 0; i < k; ++i) prod *= p;
        }
        CHECK(prod == n);
    }
}

TEST_CASE("integer roots are exact at the boundaries") {
    for (u64 r = 1; r < 1400; ++r) {
        const u64 r6 = r * r * r * r * r * r;
        CHECK(sixth_root_floor(r6) == r);
        CHECK(sixth_root_floor(r6 - 1) == r - 1);
    }
    for (u64 r = 1; r < 2000000; r += 997) {
        CHECK(icbrt(r * r * r) == r);
        CHECK(icbrt(r * r * r - 1) == r - 1);
        CHECK(isqrt(r * r) == r);
        CHECK(isqrt(r * r - 1) == r - 1);
    }
    CHECK(isqrt(~u64{0}) == 4294967295ull);
    CHECK(icbrt(~u64{0}) == 2642245ull);
}

TEST_CASE("powmod and ipow") {
    CHECK(powmod(2, 10, 1000) == 24);
    CHECK(powmod(3, 0, 7) == 1);
    CHECK(ipow(7, 3) == 343);
    CHECK_THROWS_AS(ipow(10, 20), CapacityError);
    CHECK(two_adic_valuation(96) == 5);
    CHECK(two_adic_valuation(1) == 0);
}

TEST_CASE("frac_mul matches exact dyadic arithmetic") {
    // alpha = m / 2^40 exactly; frac(alpha k) = ((m k) mod 2^40) / 2^40.
    std::mt19937_64 rng(7);
    for (int t = 0; t < 2000; ++t) {
        const u64 m = rng() >> 24;  // < 2^40
        const double alpha = std::ldexp(static_cast<double>(m), -40);
        const u128 k = (static_cast<u128>(rng()) << 8) | (rng() & 0xFF);  // < 2^72
        const u128 prod = static_cast<u128>(m) * k;  // < 2^112
        const u128 mask = (static_cast<u128>(1) << 40) - 1;
        const double expect = std::ldexp(static_cast<double>(static_cast<u64>(prod & mask)), -40);
        CHECK(frac_mul(alpha, k) == doctest::Approx(expect).epsilon(1e-15));
    }
    CHECK(frac_mul(0.25, 289) == doctest::Approx(0.25));
    CHECK(frac_mul(-0.25, 1) == doctest::Approx(0.75));
}

TEST_CASE("expi and Kahan summation") {
    CHECK(std::abs(expi(0.25) - cplx(0, 1)) < 1e-15);
    KahanSum s;
    for (int i = 0; i < 1000000; ++i) s.add(cplx(0.1, 0));
    CHECK(s.value().real() == doctest::Approx(100000.0).epsilon(1e-14));
}
