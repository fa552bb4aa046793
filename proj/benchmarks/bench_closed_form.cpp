#include <vector>

#include <benchmark/benchmark.h>

#include "mimo/closed_form.hpp"

namespace {

std::vector<double> spread_spectrum(std::size_t n) {
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = 0.5 + 1.7 * static_cast<double>(i) + 0.01 * static_cast<double>(i * i);
    return tau;
}

}  // namespace

static void BM_DensityMulti(benchmark::State& state) {
    const auto tau = spread_spectrum(static_cast<std::size_t>(state.range(0)));
    const auto K = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(mimo::EigenDensity::multi(tau, K));
}
BENCHMARK(BM_DensityMulti)->Args({20, 2})->Args({60, 5})->Args({100, 10})->Unit(benchmark::kMillisecond);

static void BM_DensityInvMean(benchmark::State& state) {
    const auto d = mimo::EigenDensity::multi(spread_spectrum(60), 5);
    for (auto _ : state) benchmark::DoNotOptimize(d.inv_mean());
}
BENCHMARK(BM_DensityInvMean)->Unit(benchmark::kMicrosecond);
