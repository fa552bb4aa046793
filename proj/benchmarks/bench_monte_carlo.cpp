#include <benchmark/benchmark.h>

#include "mimo/experiment.hpp"
#include "mimo/monte_carlo.hpp"

static void BM_McRateTrials(benchmark::State& state) {
    mimo::ExperimentConfig cfg;
    cfg.K = 10;
    const auto setup = mimo::setup_point(cfg, mimo::sample_bpp(static_cast<std::size_t>(state.range(0)),
                                                               cfg.wavelength(), 3));
    const auto s = mimo::scenario_for(setup, cfg);
    mimo::McOptions o;
    o.trials = 200;
    o.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(mimo::mc_rate(s, o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(o.trials));
}
BENCHMARK(BM_McRateTrials)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
