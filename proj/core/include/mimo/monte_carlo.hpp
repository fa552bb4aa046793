#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimo/channel.hpp"
#include "mimo/closed_form.hpp"

namespace mimo {

struct MetricEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// Everything frozen across trials: C A, the large-scale factors and the link parameters.
// Only H is redrawn per trial.
struct Scenario {
    Eigen::MatrixXcd CA;  // M x P
    SystemParams link;    // beta, SNR_UT, SNR_th, modulation
    std::string digest;

    std::size_t M() const { return static_cast<std::size_t>(CA.rows()); }
    std::size_t P() const { return static_cast<std::size_t>(CA.cols()); }
    std::size_t K() const { return link.K(); }
};

Scenario make_scenario(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A,
                       const SystemParams& link, std::string digest = {});

struct McOptions {
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;       // 0: MIMO_SIM_THREADS or hardware concurrency
    std::ostream* raw = nullptr;  // optional `trial,metric,value` dump
};

// Resampling cap for rank-deficient draws per trial slot.
inline constexpr int max_resamples = 10;

// Worker count from MIMO_SIM_THREADS, else the hardware.
unsigned thread_count();

// Runs body(t) for t in [0, n) on `threads` workers. Rethrows the first exception.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

// Sum in fixed tree order so the result does not depend on scheduling.
double pairwise_sum(const double* x, std::size_t n);

// Post-ZF SNR per user: SNR_UT / [(G^H G)^-1]_kk. Throws SingularMatrix when G^H G is.
Eigen::VectorXd zf_snr(const Eigen::MatrixXcd& G, double snr_ut);

// Post-MRC SINR of user k (0-based), G = C A H D^(1/2).
double mrc_snr(const Eigen::MatrixXcd& G, std::size_t k, double snr_ut);

struct RateEstimate {
    MetricEstimate sum;
    std::vector<MetricEstimate> per_user;
};

RateEstimate mc_rate(const Scenario& s, const McOptions& opt);
MetricEstimate mc_ser(const Scenario& s, const McOptions& opt);
MetricEstimate mc_outage(const Scenario& s, const McOptions& opt);

// Same expectations with SNR_k replaced by SNR_UT beta_k times an unordered eigenvalue of
// H^H Phi H; this is the random variable the closed-form density describes.
MetricEstimate mc_ser_eigen(const Scenario& s, const McOptions& opt);
MetricEstimate mc_outage_eigen(const Scenario& s, const McOptions& opt);

// SNR_UT beta_1 (xi - xi_min) with xi = |C A h|^2; both scenarios share h per trial.
MetricEstimate mc_gain(const Scenario& s, const Scenario& s_min, const McOptions& opt);

struct DetectorSnrs {
    Eigen::MatrixXd zf;   // trials x K
    Eigen::MatrixXd mrc;  // trials x K
};

DetectorSnrs sample_detector_snrs(const Scenario& s, const McOptions& opt);

struct EigenSample {
    std::vector<Eigen::VectorXd> spectra;  // one ascending spectrum of Psi per layout
    std::vector<double> traces;            // Tr(Psi) per layout
};

struct HistogramOptions {
    std::size_t P = 100;
    CouplingParams coupling;
    ElevationLaw law = ElevationLaw::uniform;
    unsigned threads = 0;
};

// Spectra of Psi over independent BPP layouts, each with its own incident directions.
EigenSample eigen_histogram(std::size_t M, double R, std::size_t layouts, std::uint64_t seed,
                            const HistogramOptions& opt = {});

struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<std::size_t> counts;
};

Histogram bin_values(const std::vector<double>& values, std::size_t bins);

}  // namespace mimo
