// Serial reference vs OpenMP body for each parallel kernel. The second
// argument of every benchmark selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <vector>

#include "cubesq/arcs.hpp"
#include "cubesq/census.hpp"
#include "cubesq/convolution.hpp"
#include "cubesq/cube_core.hpp"
#include "cubesq/local_densities.hpp"
#include "cubesq/numtheory.hpp"

using namespace cubesq;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void path_args(benchmark::internal::Benchmark* b, std::initializer_list<long> sizes) {
    for (long n : sizes) {
        b->Args({n, 0});
        b->Args({n, 1});
    }
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_cyclic_convolution(benchmark::State& st) {
    const auto q = static_cast<std::size_t>(st.range(0));
    std::vector<u128> a(q), b(q);
    for (std::size_t i = 0; i < q; ++i) {
        a[i] = (i * 7919) % 1000;
        b[i] = (i * 104729) % 1000;
    }
    for (auto _ : st) benchmark::DoNotOptimize(cyclic_convolve(a, b, exec_of(st), ConvMethod::direct));
}
BENCHMARK(BM_cyclic_convolution)->Apply([](auto* b) { path_args(b, {1024, 4096}); });

void BM_cube_sieve(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(sieve_cube_sums(static_cast<u64>(st.range(0)), true, exec_of(st)));
}
BENCHMARK(BM_cube_sieve)->Apply([](auto* b) { path_args(b, {1 << 22, 1 << 25}); });

void BM_smooth_sieve(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_smooth(static_cast<u64>(st.range(0)), 100, exec_of(st)));
}
BENCHMARK(BM_smooth_sieve)->Apply([](auto* b) { path_args(b, {1 << 22, 1 << 25}); });

void BM_complete_sum_table(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(complete_sum_table(static_cast<u64>(st.range(0)), exec_of(st)));
}
BENCHMARK(BM_complete_sum_table)->Apply([](auto* b) { path_args(b, {997, 4099}); });

void BM_census_sumset(benchmark::State& st) {
    const u64 N = static_cast<u64>(st.range(0));
    const auto C = sieve_cube_sums(isqrt(N), false).members();
    std::vector<u64> shifts;
    for (u64 c : C) shifts.push_back(c * c);
    BitSet S1(N);
    for (u64 t : shifts) S1.set(t);
    const BitSet S2 = sumset(S1, shifts);
    for (auto _ : st) benchmark::DoNotOptimize(sumset(S2, shifts, exec_of(st)));
}
BENCHMARK(BM_census_sumset)->Apply([](auto* b) { path_args(b, {1 << 22, 1 << 25}); });

void BM_singular_integral(benchmark::State& st) {
    const Params prm = params_from_P(static_cast<u64>(st.range(0)), 0.5);
    const std::vector<u64> primes = primes_in(prm.M / 2, prm.M);
    JOptions o;
    o.samples = 1000;
    const double n = 2.0 * static_cast<double>(ipow(prm.P, 6));
    for (auto _ : st) benchmark::DoNotOptimize(singular_integral_J(n, prm, primes, o, exec_of(st)));
}
BENCHMARK(BM_singular_integral)->Apply([](auto* b) { path_args(b, {20}); });

void BM_exact_R_range(benchmark::State& st) {
    const Params prm = params_from_P(static_cast<u64>(st.range(0)), 0.5);
    const auto ta = build_weight_table(prm, Role::a);
    const auto tb = build_weight_table(prm, Role::b);
    const std::vector<u64> primes = primes_in(prm.M / 2, prm.M);
    const u64 c = 2 * ipow(prm.P, 6);
    for (auto _ : st) benchmark::DoNotOptimize(exact_R_range(c - c / 20, c + c / 20, ta, tb, primes, exec_of(st)));
}
BENCHMARK(BM_exact_R_range)->Apply([](auto* b) { path_args(b, {20}); });

}  // namespace

BENCHMARK_MAIN();
