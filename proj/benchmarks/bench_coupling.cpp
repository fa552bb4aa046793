#include <benchmark/benchmark.h>

#include "mimo/coupling.hpp"
#include "mimo/geometry.hpp"

static void BM_ImpedanceMatrix(benchmark::State& state) {
    const mimo::CouplingParams p;
    const auto l = mimo::sample_bpp(static_cast<std::size_t>(state.range(0)), 2.0 * p.wavelength, 1);
    for (auto _ : state) benchmark::DoNotOptimize(mimo::impedance_matrix(l, p));
}
BENCHMARK(BM_ImpedanceMatrix)->Arg(20)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

static void BM_CouplingMatrix(benchmark::State& state) {
    const mimo::CouplingParams p;
    const auto l = mimo::sample_bpp(static_cast<std::size_t>(state.range(0)), 2.0 * p.wavelength, 1);
    const auto Z = mimo::impedance_matrix(l, p);
    for (auto _ : state) benchmark::DoNotOptimize(mimo::coupling_matrix(Z, p));
}
BENCHMARK(BM_CouplingMatrix)->Arg(20)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
