#include "cubesq/numtheory.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace cubesq {

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::string to_string(i128 v) {
    if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
    return to_string(static_cast<u128>(v));
}

namespace {
int g_max_threads = 0;
std::size_t g_budget = 0;
bool g_budget_init = false;
}  // namespace

void set_max_threads(int n) {
    g_max_threads = n;
    if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return g_max_threads > 0 ? g_max_threads : omp_get_max_threads(); }

std::size_t MemoryBudget::bytes() {
    if (!g_budget_init) {
        g_budget = std::size_t{2} << 30;
        if (const char* env = std::getenv("CUBESQ_MEMORY_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) g_budget = static_cast<std::size_t>(v);
        }
        g_budget_init = true;
    }
    return g_budget;
}

void MemoryBudget::set_bytes(std::size_t b) {
    g_budget = b;
    g_budget_init = true;
}

void MemoryBudget::require(std::size_t count, std::size_t elem_size, const std::string& what) {
    const u128 need = static_cast<u128>(count) * elem_size;
    if (need > bytes()) {
        throw CapacityError(what + ": needs " + to_string(need) + " bytes, budget is " +
                            std::to_string(bytes()));
    }
}

std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

std::vector<u64> primes_in(double lo, double hi) {
    std::vector<u64> out;
    if (hi < 2) return out;
    for (u64 p : primes_up_to(static_cast<u64>(std::floor(hi)))) {
        if (static_cast<double>(p) >= lo) out.push_back(p);
    }
    return out;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::vector<PrimePower> factorize(u64 n) {
    std::vector<PrimePower> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        int k = 0;
        while (n % d == 0) {
            n /= d;
            ++k;
        }
        out.push_back({d, k});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

u64 ipow(u64 b, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) {
        if (b != 0 && r > UINT64_MAX / b) throw CapacityError("ipow: 64-bit overflow");
        r *= b;
    }
    return r;
}

int two_adic_valuation(u64 n) {
    if (n == 0) throw ContractError("two_adic_valuation: n must be nonzero");
    return __builtin_ctzll(n);
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 icbrt(u64 n) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
    auto cube = [](u64 x) { return static_cast<u128>(x) * x * x; };
    while (r > 0 && cube(r) > n) --r;
    while (cube(r + 1) <= n) ++r;
    return r;
}

u64 sixth_root_floor(u64 n) {
    u64 r = static_cast<u64>(std::pow(static_cast<long double>(n), 1.0L / 6.0L));
    auto six = [](u64 x) {
        u128 s = static_cast<u128>(x) * x * x;
        return s * s;
    };
    while (r > 0 && six(r) > n) --r;
    while (six(r + 1) <= n) ++r;
    return r;
}

cplx expi(double x) {
    const double t = 2.0 * std::numbers::pi * x;
    return {std::cos(t), std::sin(t)};
}

double frac_mul(double alpha, u128 k) {
    alpha -= std::floor(alpha);
    if (alpha == 0.0 || k == 0) return 0.0;
    int exp = 0;
    const double m = std::frexp(alpha, &exp);  // alpha = m * 2^exp, m in [0.5, 1)
    const u64 mant = static_cast<u64>(std::ldexp(m, 53));
    const int shift = 53 - exp;  // alpha = mant / 2^shift
    if (shift >= 128) {
        long double v = static_cast<long double>(alpha) * static_cast<long double>(k);
        return static_cast<double>(v - std::floor(v));
    }
    const u128 prod = static_cast<u128>(mant) * k;
    const u128 mask = (static_cast<u128>(1) << shift) - 1;
    const u128 rem = prod & mask;
    return std::ldexp(static_cast<double>(rem), -shift);
}

void KahanSum::add(cplx v) {
    const cplx y = v - comp_;
    const cplx t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
}

}  // namespace cubesq
