#include "cubesq/convolution.hpp"

#include <algorithm>
#include <array>

#include "cubesq/numtheory.hpp"

namespace cubesq {

namespace {

u128 checked_total(std::span<const u128> v) {
    u128 s = 0;
    for (u128 x : v) {
        if (__builtin_add_overflow(s, x, &s)) throw CapacityError("convolution: input total exceeds 128 bits");
    }
    return s;
}

void check_product_fits(std::span<const u128> a, std::span<const u128> b) {
    u128 prod = 0;
    if (__builtin_mul_overflow(checked_total(a), checked_total(b), &prod)) {
        throw CapacityError("convolution: sum(a) * sum(b) exceeds 128 bits; entries may overflow");
    }
}

std::vector<u128> direct_serial(std::span<const u128> a, std::span<const u128> b, std::size_t out_len,
                                bool cyclic) {
    std::vector<u128> c(out_len, 0);
    const std::size_t q = out_len;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] == 0) continue;
        for (std::size_t u = 0; u < b.size(); ++u) {
            std::size_t t = s + u;
            if (cyclic && t >= q) t -= q;
            c[t] += a[s] * b[u];
        }
    }
    return c;
}

std::vector<u128> direct_parallel(std::span<const u128> a, std::span<const u128> b, std::size_t out_len,
                                  bool cyclic) {
    std::vector<std::size_t> nz;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] != 0) nz.push_back(s);
    }
    std::vector<u128> c(out_len, 0);
    const std::size_t q = out_len;
    const std::size_t nb = b.size();
    const std::ptrdiff_t n_out = static_cast<std::ptrdiff_t>(out_len);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < n_out; ++ti) {
        const std::size_t t = static_cast<std::size_t>(ti);
        u128 acc = 0;
        for (std::size_t s : nz) {
            std::size_t u;
            if (cyclic) {
                u = t >= s ? t - s : t + q - s;
            } else {
                if (s > t) break;
                u = t - s;
            }
            if (u < nb) acc += a[s] * b[u];
        }
        c[t] = acc;
    }
    return c;
}

// --- NTT ----------------------------------------------------------------

std::uint32_t primitive_root(std::uint32_t p) {
    std::vector<u64> fac;
    for (const auto& pp : factorize(p - 1)) fac.push_back(pp.p);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (u64 f : fac) {
            if (powmod(g, (p - 1) / f, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return static_cast<std::uint32_t>(g);
    }
}

void ntt_inplace(std::vector<std::uint32_t>& a, std::uint32_t p, std::uint32_t g, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        u64 w = powmod(g, (p - 1) / len, p);
        if (invert) w = powmod(w, p - 2, p);
        const std::size_t half = len / 2;
        std::vector<std::uint32_t> tw(half);
        u64 cur = 1;
        for (std::size_t k = 0; k < half; ++k) {
            tw[k] = static_cast<std::uint32_t>(cur);
            cur = cur * w % p;
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const u64 u = a[i + k];
                const u64 v = static_cast<u64>(a[i + k + half]) * tw[k] % p;
                a[i + k] = static_cast<std::uint32_t>(u + v >= p ? u + v - p : u + v);
                a[i + k + half] = static_cast<std::uint32_t>(u >= v ? u - v : u + p - v);
            }
        }
    }
    if (invert) {
        const u64 inv_n = powmod(n, p - 2, p);
        for (auto& x : a) x = static_cast<std::uint32_t>(x * inv_n % p);
    }
}

std::size_t ntt_size(std::size_t need) {
    std::size_t n = 1;
    while (n < need) n <<= 1;
    return n;
}

}  // namespace

namespace detail {

std::vector<std::uint32_t> ntt_convolve_mod(std::span<const u128> a, std::span<const u128> b,
                                            std::uint32_t prime) {
    const std::size_t out = a.size() + b.size() - 1;
    const std::size_t n = ntt_size(out);
    if (((prime - 1) & (n - 1)) != 0) throw CapacityError("ntt: transform length exceeds prime's 2-adic order");
    const std::uint32_t g = primitive_root(prime);
    std::vector<std::uint32_t> fa(n, 0), fb(n, 0);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = static_cast<std::uint32_t>(a[i] % prime);
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = static_cast<std::uint32_t>(b[i] % prime);
    ntt_inplace(fa, prime, g, false);
    ntt_inplace(fb, prime, g, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] = static_cast<std::uint32_t>(static_cast<u64>(fa[i]) * fb[i] % prime);
    ntt_inplace(fa, prime, g, true);
    fa.resize(out);
    return fa;
}

}  // namespace detail

namespace {

std::vector<u128> ntt_linear(std::span<const u128> a, std::span<const u128> b, Exec exec) {
    MemoryBudget::require((a.size() + b.size()) * 2 * 6, sizeof(std::uint32_t), "ntt convolution");
    constexpr int kPrimes = 5;
    std::array<std::vector<std::uint32_t>, kPrimes + 1> res;
    auto run = [&](int i) {
        const std::uint32_t p = i < kPrimes ? detail::kNttPrimes[i] : detail::kNttCheckPrime;
        res[i] = detail::ntt_convolve_mod(a, b, p);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int i = 0; i <= kPrimes; ++i) run(i);
    } else {
        for (int i = 0; i <= kPrimes; ++i) run(i);
    }

    // Garner: x = d0 + p0*(d1 + p1*(d2 + ...)).
    std::array<std::array<u64, kPrimes>, kPrimes> inv{};
    for (int i = 0; i < kPrimes; ++i) {
        for (int j = 0; j < i; ++j) {
            inv[j][i] = powmod(detail::kNttPrimes[j] % detail::kNttPrimes[i], detail::kNttPrimes[i] - 2,
                               detail::kNttPrimes[i]);
        }
    }
    const std::size_t out = res[0].size();
    std::vector<u128> c(out);
    bool overflow_any = false;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel) reduction(|| : overflow_any)
    for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(out); ++ti) {
        const std::size_t t = static_cast<std::size_t>(ti);
        std::array<u64, kPrimes> d{};
        for (int i = 0; i < kPrimes; ++i) {
            const u64 pi = detail::kNttPrimes[i];
            u64 x = res[i][t];
            for (int j = 0; j < i; ++j) {
                x = (x + pi - d[j] % pi) % pi;
                x = x * inv[j][i] % pi;
            }
            d[i] = x;
        }
        u128 value = d[kPrimes - 1];
        bool overflow = false;
        for (int i = kPrimes - 2; i >= 0; --i) {
            u128 tmp;
            overflow |= __builtin_mul_overflow(value, static_cast<u128>(detail::kNttPrimes[i]), &tmp);
            overflow |= __builtin_add_overflow(tmp, static_cast<u128>(d[i]), &value);
        }
        c[t] = value;
        overflow_any = overflow_any || overflow;
    }
    if (overflow_any) throw VerificationError("ntt: reconstructed value exceeds 128 bits");
    const u64 pc = detail::kNttCheckPrime;
    for (std::size_t t = 0; t < out; ++t) {
        if (static_cast<u64>(c[t] % pc) != res[kPrimes][t]) {
            throw VerificationError("ntt: residue check against the verification prime failed");
        }
    }
    return c;
}

}  // namespace

std::vector<u128> linear_convolve(std::span<const u128> a, std::span<const u128> b, Exec exec,
                                  ConvMethod method) {
    if (a.empty() || b.empty()) return {};
    check_product_fits(a, b);
    const std::size_t out = a.size() + b.size() - 1;
    MemoryBudget::require(out, sizeof(u128), "linear convolution output");
    if (method == ConvMethod::automatic) {
        method = std::min(a.size(), b.size()) <= kDirectConvolutionLimit ? ConvMethod::direct : ConvMethod::ntt;
    }
    if (method == ConvMethod::ntt) return ntt_linear(a, b, exec);
    return exec == Exec::serial ? direct_serial(a, b, out, false) : direct_parallel(a, b, out, false);
}

std::vector<u128> cyclic_convolve(std::span<const u128> a, std::span<const u128> b, Exec exec,
                                  ConvMethod method) {
    if (a.size() != b.size()) throw ContractError("cyclic_convolve: length mismatch");
    if (a.empty()) return {};
    check_product_fits(a, b);
    const std::size_t q = a.size();
    if (method == ConvMethod::automatic) {
        method = q <= kDirectConvolutionLimit ? ConvMethod::direct : ConvMethod::ntt;
    }
    if (method == ConvMethod::direct) {
        MemoryBudget::require(q, sizeof(u128), "cyclic convolution output");
        return exec == Exec::serial ? direct_serial(a, b, q, true) : direct_parallel(a, b, q, true);
    }
    std::vector<u128> lin = ntt_linear(a, b, exec);
    std::vector<u128> c(q, 0);
    for (std::size_t t = 0; t < lin.size(); ++t) c[t % q] += lin[t];
    return c;
}

}  // namespace cubesq
