#include <benchmark/benchmark.h>

#include "mimo/special.hpp"

static void BM_Sici(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0)) / 10.0;
    double s = 0.0, c = 0.0;
    for (auto _ : state) {
        mimo::sici(x, s, c);
        benchmark::DoNotOptimize(s);
        benchmark::DoNotOptimize(c);
    }
}
// either side of the series/asymptotic crossover
BENCHMARK(BM_Sici)->Arg(5)->Arg(30)->Arg(400);

static void BM_LnGamma(benchmark::State& state) {
    double x = 7.3;
    for (auto _ : state) benchmark::DoNotOptimize(mimo::ln_gamma(x));
}
BENCHMARK(BM_LnGamma);
