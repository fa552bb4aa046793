#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mimo/experiment.hpp"

namespace mimo {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string measured;
    std::string tolerance;
    std::vector<std::string> details;  // extra indented report lines
};

struct ValidationOptions {
    std::vector<int> only;  // empty: all criteria
    unsigned threads = 0;   // 0: MIMO_SIM_THREADS or hardware
    // Harness self-test: tightens every tolerance to an impossible value.
    bool sabotage = false;
};

struct ValidationReport {
    std::uint64_t seed = 0;
    std::string digest;
    std::vector<CriterionResult> results;

    bool all_passed() const;
    // Deterministic text: no timings, no thread counts.
    std::string text() const;
};

inline constexpr int criterion_count = 12;

// Criteria that fail for reasons analysed outside the code (model/figure mismatch).
const std::vector<int>& known_unattainable();

ValidationReport run_validation(const ExperimentConfig& cfg, const ValidationOptions& opt = {});

// Kolmogorov-Smirnov statistic of a sample against a CDF, and its asymptotic p-value.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_p_value(double D, std::size_t n);

}  // namespace mimo
