#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace mimo {

// Relative threshold below which eigenvalues are dropped (rank deficiency).
inline constexpr double spectrum_drop_ratio = 1e-10;
// Minimum relative gap between consecutive eigenvalues.
inline constexpr double spectrum_min_gap = 1e-6;

struct SpectrumDiagnostics {
    std::size_t input_size = 0;
    std::size_t dropped = 0;  // below spectrum_drop_ratio * tau_max
    std::size_t spread = 0;   // eigenvalues moved to restore the minimum gap
    double max_shift = 0.0;   // largest relative move, in units of tau_max
};

struct PreparedSpectrum {
    std::vector<double> tau;  // ascending, strictly positive, gaps >= spectrum_min_gap * tau_max
    SpectrumDiagnostics diagnostics;
};

PreparedSpectrum prepare_spectrum(const std::vector<double>& raw);
PreparedSpectrum prepare_spectrum(const Eigen::VectorXd& raw);

// Throws DegenerateSpectrum unless tau is ascending, positive and gap-separated.
void check_spectrum(const std::vector<double>& tau);

// Which exponent the closed outage terms use on the exponential sum.
enum class OutageExponent {
    corrected,  // n + y - s - 1, matches direct integration
    minus_three,  // n + y - s - 3, the other reading of the sum
};

namespace detail {
class DensityImpl;
}

// Conditional eigenvalue density of H^H Phi H given the spectrum of Psi.
// Evaluated in multiprecision; values are returned in double.
class EigenDensity {
public:
    // Distribution of h^H Psi h (one user).
    static EigenDensity single(const std::vector<double>& tau);
    // Marginal of the unordered eigenvalues with K users.
    static EigenDensity multi(const std::vector<double>& tau, std::size_t K);

    std::size_t users() const;
    std::size_t size() const;
    double scale() const noexcept { return scale_; }
    int precision_digits() const;

    double pdf(double x) const;
    double cdf(double x) const;
    double moment(int k) const;  // E[x^k], k >= 0
    double mean() const { return moment(1); }
    // E[1/x]. all_j sums the logarithmic term over every cofactor column.
    double inv_mean(bool all_j = false) const;

    // Closed incomplete-gamma terms for P(x <= a).
    double cdf_closed(double a, OutageExponent e = OutageExponent::corrected) const;
    // E[erfc(sqrt(c x))] from exact Gamma-erfc terms.
    double erfc_mean_closed(double c) const;

    // log|normaliser| two ways: 1/(K det Omega) and the product form over eigenvalue gaps.
    double log_normaliser() const;
    double log_normaliser_product_form() const;

private:
    EigenDensity(std::shared_ptr<const detail::DensityImpl> impl, double scale);
    std::shared_ptr<const detail::DensityImpl> impl_;
    double scale_;
};

struct Modulation {
    double omega = 2.0;
    double varpi = 0.5;
};

struct SystemParams {
    double snr_ut = 1.0;  // linear
    Eigen::VectorXd beta;  // size K
    double snr_th = 0.5;   // linear
    std::vector<Modulation> modulation;  // one per user, or one for all, or empty for QPSK

    std::size_t K() const { return static_cast<std::size_t>(beta.size()); }
    Modulation modulation_for(std::size_t k) const;
    void check() const;
};

// E(xi) for the one-user density; the trace of Psi in exact arithmetic.
double expected_xi(const std::vector<double>& tau);

double ergodic_gain(const std::vector<double>& tau, const std::vector<double>& tau_hat,
                    double snr_ut, double beta_1);

// Per-user lower bound on the ZF ergodic rate, bits/s/Hz.
Eigen::VectorXd rate_lower_bound(const SystemParams& params, const std::vector<double>& tau);

// Integral of the erfc kernel against the density, adaptive quadrature.
double ser_closed_form(const SystemParams& params, const std::vector<double>& tau);
double ser_closed_form(const SystemParams& params, const EigenDensity& f);
// Same quantity from exact Gamma-erfc terms.
double ser_closed_terms(const SystemParams& params, const EigenDensity& f);

double outage_closed_form(const SystemParams& params, const std::vector<double>& tau,
                          OutageExponent e = OutageExponent::corrected);
double outage_closed_form(const SystemParams& params, const EigenDensity& f,
                          OutageExponent e = OutageExponent::corrected);
// Quadrature of the density up to each user's threshold.
double outage_quadrature(const SystemParams& params, const EigenDensity& f);

// Tr(A^H C^H C A).
double channel_trace(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C);

double asymptotic_snr(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C, double snr_ut,
                      double beta_k);
double asymptotic_rate(const SystemParams& params, double trace);
double asymptotic_rate(const SystemParams& params, const Eigen::MatrixXcd& A,
                       const Eigen::MatrixXcd& C);
double asymptotic_ser(const SystemParams& params, double trace);
double asymptotic_ser(const SystemParams& params, const Eigen::MatrixXcd& A,
                      const Eigen::MatrixXcd& C);
double asymptotic_gain(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C,
                       const Eigen::MatrixXcd& A_hat, const Eigen::MatrixXcd& C_hat,
                       double snr_ut, double beta_1);

}  // namespace mimo
