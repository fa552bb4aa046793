#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimo/channel.hpp"
#include "mimo/closed_form.hpp"
#include "mimo/coupling.hpp"
#include "mimo/geometry.hpp"
#include "mimo/monte_carlo.hpp"

namespace mimo {

// A length given in metres or in wavelengths ("1.5lam", "1.5λ").
struct Length {
    double value = 0.0;
    bool wavelengths = false;

    double metres(double lambda) const { return wavelengths ? value * lambda : value; }
    static Length parse(const std::string& text);
    std::string str() const;
};

struct ExperimentConfig {
    double carrier_frequency = 2.5e9;
    std::size_t P = 100;
    std::size_t K = 10;
    double snr_ut_dB = 15.0;
    double Z0 = 50.0;
    double ZL = 50.0;
    Length dipole_l{0.5, true};
    double sigma_shadow_dB = 8.0;
    double l_resist = 10.0;
    double l_min = 10.0;
    double l_max = 150.0;
    double pathloss_v = 3.8;
    double snr_th_dB = -3.0;
    std::size_t M_min = 2;
    Length R_min{1.0, true};
    std::uint64_t seed = 1;
    std::size_t trials = 1000;

    // sweep axes; empty means the sweep's own default
    std::vector<std::size_t> M;
    std::vector<Length> R;
    std::vector<double> zeta;
    std::vector<double> snr_dB;
    std::size_t layouts = 0;
    std::size_t bins = 50;
    ElevationLaw elevation = ElevationLaw::uniform;

    double wavelength() const;
    CouplingParams coupling() const;
    LargeScaleParams large_scale() const;
    void check() const;
};

// Applies one `key = value` setting; throws InvalidArgument on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Flat INI text: `key = value`, `#`/`;` comments, [section] lines ignored.
void load_ini(ExperimentConfig& cfg, std::istream& is);
ExperimentConfig load_ini_file(const std::string& path);

// Every field as sorted `key=value` lines; the digest hashes this text.
std::string canonical_text(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

double db_to_linear(double dB);

// Axis parsing: "a:b:step", "a:b" (19 points), or comma lists.
std::vector<std::size_t> parse_count_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<Length> parse_length_list(const std::string& text);

// ---------------------------------------------------------------- sweep points

// Nominal zeta served by plain BPP sampling; 0 is the regular grid.
inline constexpr double bpp_zeta = 1.5;

struct PointSetup {
    AntennaLayout layout;
    Eigen::MatrixXcd C;
    Eigen::MatrixXcd A;
    CorrelationSpectrum corr;
    PreparedSpectrum spectrum;
    SystemParams link;
};

// Layout for a sweep point: regular for zeta = 0, BPP for zeta = bpp_zeta, else jittered.
AntennaLayout layout_for(std::size_t M, double R, std::optional<double> zeta, std::uint64_t seed);

// The propagation environment shared by all sweep points of one config.
IncidentDirections shared_directions(const ExperimentConfig& cfg);
Eigen::VectorXd shared_beta(const ExperimentConfig& cfg);

PointSetup setup_point(const ExperimentConfig& cfg, const AntennaLayout& layout,
                       bool coupling = true);

Scenario scenario_for(const PointSetup& p, const ExperimentConfig& cfg);

McOptions mc_options(const ExperimentConfig& cfg, unsigned threads = 0);

struct RatePoint {
    std::size_t M = 0;
    std::size_t M_eff = 0;
    double R_lambda = 0.0;
    double zeta = 0.0;
    double lower_bound = 0.0;  // sum over users
    MetricEstimate mc;         // sum over users
    double asymptotic = 0.0;
};

RatePoint rate_point(const ExperimentConfig& cfg, const AntennaLayout& layout, bool coupling = true,
                     unsigned threads = 0);

struct GainPoint {
    std::size_t M = 0;
    double R_lambda = 0.0;
    double zeta = 0.0;
    double closed_form = 0.0;
    MetricEstimate mc;
};

GainPoint gain_point(const ExperimentConfig& cfg, const AntennaLayout& layout,
                     const AntennaLayout& reference, unsigned threads = 0);

struct SerPoint {
    double snr_dB = 0.0;
    double closed_form = 0.0;  // quadrature
    double terms = 0.0;        // exact Gamma-erfc sum
    MetricEstimate mc;         // ZF detector
    MetricEstimate mc_eigen;   // unordered eigenvalue
    double asymptotic = 0.0;
};

std::vector<SerPoint> ser_points(const ExperimentConfig& cfg, const PointSetup& setup,
                                 const std::vector<double>& snr_dB, unsigned threads = 0);

struct OutagePoint {
    double snr_dB = 0.0;
    double closed_form = 0.0;  // corrected exponent
    double exp3 = 0.0;         // n + y - s - 3 exponent
    double quadrature = 0.0;
    MetricEstimate mc;
    MetricEstimate mc_eigen;
};

std::vector<OutagePoint> outage_points(const ExperimentConfig& cfg, const PointSetup& setup,
                                       const std::vector<double>& snr_dB, unsigned threads = 0);

struct EtaPoint {
    double R_lambda = 0.0;
    double zeta = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t layouts = 0;
};

// One curve per zeta value, in zeta-major order.
std::vector<EtaPoint> eta_points(const ExperimentConfig& cfg, std::size_t M,
                                 const std::vector<Length>& R, const std::vector<double>& zeta,
                                 std::size_t layouts);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double t = 0.0;
    std::size_t n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Two-sided 95% critical value of Student's t with dof degrees of freedom.
double t_critical_95(std::size_t dof);
// x positions where a - b changes sign, linearly interpolated.
std::vector<double> crossings(const std::vector<double>& x, const std::vector<double>& a,
                              const std::vector<double>& b);

// ---------------------------------------------------------------- sweeps

inline const std::vector<std::string> sweep_names = {
    "eigen-hist", "eta", "gain", "rate", "rate-coupling", "ser", "outage"};

struct SweepResult {
    std::string csv;                   // header plus rows
    std::vector<std::string> summary;  // human-readable lines
};

SweepResult run_sweep(const std::string& name, const ExperimentConfig& cfg);

}  // namespace mimo
