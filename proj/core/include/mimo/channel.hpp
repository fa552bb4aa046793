#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mimo/coupling.hpp"
#include "mimo/geometry.hpp"
#include "mimo/rng.hpp"

namespace mimo {

struct Direction {
    double phi = 0.0;    // azimuth in [0, 2pi)
    double theta = 0.0;  // elevation in [-pi/2, pi/2]
};

enum class ElevationLaw { uniform, cosine };

struct IncidentDirections {
    std::vector<Direction> angles;
    std::size_t size() const noexcept { return angles.size(); }
};

struct LargeScaleParams {
    double l_resist = 10.0;
    double l_min = 10.0;
    double l_max = 150.0;
    double exponent = 3.8;
    double sigma_dB = 8.0;
};

struct ChannelSet {
    Eigen::MatrixXcd C;  // M x M
    Eigen::MatrixXcd A;  // M x P
    Eigen::MatrixXcd H;  // P x K
    Eigen::VectorXd beta;  // diagonal of D
    Eigen::MatrixXcd G;  // M x K
};

struct CorrelationSpectrum {
    Eigen::MatrixXcd Psi;
    Eigen::VectorXd tau;  // ascending, >= 0
    double eta = 0.0;
    int clamped = 0;  // eigenvalues below 1e-12 tau_M set to 0
};

inline constexpr double eigen_clamp_ratio = 1e-12;

IncidentDirections draw_directions(std::size_t P, std::uint64_t seed,
                                   ElevationLaw law = ElevationLaw::uniform);

cdouble steering_element(double d, double psi, double phi, double theta, double lambda);

Eigen::MatrixXcd steering_matrix(const AntennaLayout& layout, const IncidentDirections& dirs,
                                 double lambda);

// i.i.d. CN(0,1).
Eigen::MatrixXcd draw_small_scale(std::size_t P, std::size_t K, Rng& rng);
Eigen::MatrixXcd draw_small_scale(std::size_t P, std::size_t K, std::uint64_t seed);

// beta = z / (l / l_resist)^v.
double large_scale_factor(double l, double z, const LargeScaleParams& p);
Eigen::VectorXd draw_large_scale(std::size_t K, const LargeScaleParams& p, std::uint64_t seed);

ChannelSet compose_channel(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A,
                           const Eigen::MatrixXcd& H, const Eigen::VectorXd& beta);

CorrelationSpectrum correlation(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A);

// Eigenvalues of a Hermitian matrix, ascending, with the small-eigenvalue clamp.
Eigen::VectorXd hermitian_spectrum(const Eigen::MatrixXcd& X, int* clamped = nullptr);

double matrix_correlation_coefficient(const Eigen::MatrixXcd& Psi);

void write_spectrum_csv(std::ostream& os, const Eigen::VectorXd& tau);
// Header `M,R,zeta,eta` and one row; R in metres.
void write_correlation_summary(std::ostream& os, std::size_t M, double R, double zeta, double eta);

}  // namespace mimo
