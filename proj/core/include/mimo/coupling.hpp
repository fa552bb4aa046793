#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Dense>

#include "mimo/geometry.hpp"

namespace mimo {

using cdouble = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0;
inline constexpr double free_space_impedance = 376.730313668;

struct CouplingParams {
    double wavelength = speed_of_light / 2.5e9;
    double dipole_length = 0.5 * speed_of_light / 2.5e9;
    double eta0 = free_space_impedance;
    cdouble Z0{50.0, 0.0};
    cdouble ZL{50.0, 0.0};

    // Half-wave dipoles at the given carrier.
    static CouplingParams at_frequency(double hz);
    void check() const;
};

// Closer pairs than this fraction of a wavelength are rejected.
inline constexpr double min_spacing_wavelengths = 1e-4;
// Condition estimate above which coupling_matrix warns through its out-parameter.
inline constexpr double coupling_condition_warn = 1e12;

cdouble mutual_impedance(double d, const CouplingParams& params);

Eigen::MatrixXcd impedance_matrix(const AntennaLayout& layout, const CouplingParams& params);

// C = (Z0 + ZL)(ZL I + Z_C)^-1. condition, if given, receives the 1-norm estimate.
Eigen::MatrixXcd coupling_matrix(const Eigen::MatrixXcd& Zc, const CouplingParams& params,
                                 double* condition = nullptr);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& Z);

}  // namespace mimo
