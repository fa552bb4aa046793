// Mean of irregularity_statistic over BPP layouts; the result is pasted into geometry.cpp.
#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mimo/geometry.hpp"
#include "mimo/monte_carlo.hpp"
#include "mimo/rng.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mimo-calibrate: BPP reference for the irregularity coefficient"};
    std::size_t M = 100;
    std::size_t layouts = 1000;
    std::uint64_t seed = 0;
    app.add_option("--M", M, "antennas per layout");
    app.add_option("--layouts", layouts, "number of BPP layouts");
    app.add_option("--seed", seed, "seed");
    CLI11_PARSE(app, argc, argv);

    std::vector<double> g(layouts);
    mimo::parallel_for(layouts, 0, [&](std::size_t i) {
        const auto l = mimo::sample_bpp(M, 1.0, mimo::derive_seed(seed, mimo::Stream::calibration, i), false);
        g[i] = mimo::irregularity_statistic(l);
    });
    const double mean = mimo::pairwise_sum(g.data(), g.size()) / static_cast<double>(g.size());
    double ss = 0.0;
    for (double v : g) ss += (v - mean) * (v - mean);
    fmt::print("M={} layouts={} seed={}\nmean={:.17g}\nsd={:.6g}\n", M, layouts, seed, mean,
               std::sqrt(ss / static_cast<double>(g.size() - 1)));
    return 0;
}
