// convolution.hpp
//
// Exact cyclic convolution of nonnegative integer sequences. This is the
// engine behind residue distributions, local solution counts and exact
// representation counts.
//
// Two strategies:
//   direct  O(q^2), with a scatter-form serial reference and a gather-form
//           OpenMP kernel (one output index per iteration, race free).
//   ntt     five-prime number theoretic transform with Garner reconstruction
//           into 128 bits; the result is re-checked against a sixth prime.
//
// Every entry of a*b is bounded by sum(a) * sum(b), so the call refuses up
// front (CapacityError) when that product does not fit in 128 bits.

#pragma once

#include <span>
#include <vector>

#include "cubesq/core.hpp"

namespace cubesq {

enum class ConvMethod { automatic, direct, ntt };

// Lengths above this use the NTT when ConvMethod::automatic is requested.
inline constexpr std::size_t kDirectConvolutionLimit = 4096;

// c[t] = sum_{s} a[s] * b[(t - s) mod q], with q = a.size() = b.size().
std::vector<u128> cyclic_convolve(std::span<const u128> a, std::span<const u128> b,
                                  Exec exec = Exec::parallel,
                                  ConvMethod method = ConvMethod::automatic);

// Linear convolution, result length a.size() + b.size() - 1.
std::vector<u128> linear_convolve(std::span<const u128> a, std::span<const u128> b,
                                  Exec exec = Exec::parallel,
                                  ConvMethod method = ConvMethod::automatic);

namespace detail {
// Residues of the linear convolution modulo one NTT prime; exposed for tests.
std::vector<std::uint32_t> ntt_convolve_mod(std::span<const u128> a, std::span<const u128> b,
                                            std::uint32_t prime);
inline constexpr std::uint32_t kNttPrimes[5] = {998244353u, 167772161u, 469762049u, 754974721u,
                                                2013265921u};
inline constexpr std::uint32_t kNttCheckPrime = 1811939329u;
}  // namespace detail

}  // namespace cubesq
