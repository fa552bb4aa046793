#include "mimo/coupling.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mimo/errors.hpp"
#include "mimo/special.hpp"

namespace mimo {

CouplingParams CouplingParams::at_frequency(double hz) {
    detail::check_positive(hz, "frequency");
    CouplingParams p;
    p.wavelength = speed_of_light / hz;
    p.dipole_length = 0.5 * p.wavelength;
    return p;
}

void CouplingParams::check() const {
    detail::check_positive(wavelength, "wavelength");
    detail::check_positive(dipole_length, "dipole length");
    detail::check_positive(eta0, "free-space impedance");
}

cdouble mutual_impedance(double d, const CouplingParams& params) {
    params.check();
    detail::check_finite(d, "d");
    if (!(d > 0.0)) throw InvalidArgument("mutual_impedance: spacing must be positive");
    const double k = 2.0 * pi / params.wavelength;
    const double l = params.dipole_length;
    const double root = std::hypot(d, l);
    const double sigma = k * d;
    const double mu = k * (root + l);
    // root - l cancels for d << l; use d^2 / (root + l)
    const double rho = k * (d * d / (root + l));

    double si_s, ci_s, si_m, ci_m, si_r, ci_r;
    sici(sigma, si_s, ci_s);
    sici(mu, si_m, ci_m);
    sici(rho, si_r, ci_r);
    const double re = 2.0 * ci_s - ci_m - ci_r;
    const double im = -(2.0 * si_s - si_m - si_r);
    return params.eta0 / (4.0 * pi) * cdouble(re, im);
}

Eigen::MatrixXcd impedance_matrix(const AntennaLayout& layout, const CouplingParams& params) {
    validate(layout);
    params.check();
    const auto M = static_cast<Eigen::Index>(layout.size());
    const double dmin = min_spacing_wavelengths * params.wavelength;
    Eigen::MatrixXcd Z(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        Z(i, i) = params.Z0;
        for (Eigen::Index j = i + 1; j < M; ++j) {
            const double d = pairwise_distance(layout, i, j);
            if (d < dmin)
                throw DegenerateLayout(fmt::format(
                    "antennas {} and {} are {:.3g} m apart, below {:.3g} m", i + 1, j + 1, d, dmin));
            Z(i, j) = Z(j, i) = mutual_impedance(d, params);
        }
    }
    return Z;
}

Eigen::MatrixXcd coupling_matrix(const Eigen::MatrixXcd& Zc, const CouplingParams& params,
                                 double* condition) {
    if (Zc.rows() != Zc.cols() || Zc.rows() == 0)
        throw InvalidArgument("coupling_matrix: Z_C must be square and non-empty");
    const auto M = Zc.rows();
    Eigen::MatrixXcd T = Zc;
    T.diagonal().array() += params.ZL;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(T);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (condition) *condition = cond;
    if (!(rcond > std::numeric_limits<double>::epsilon()))
        throw SingularMatrix("coupling_matrix: ZL I + Z_C is singular", cond);
    Eigen::MatrixXcd C = lu.solve(Eigen::MatrixXcd::Identity(M, M));
    C *= (params.Z0 + params.ZL);
    return C;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& Z) {
    fmt::print(os, "# Z_C M={}\n", Z.rows());
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        for (Eigen::Index j = 0; j < Z.cols(); ++j) {
            if (j) os << ',';
            fmt::print(os, "{:.17g},{:.17g}", Z(i, j).real(), Z(i, j).imag());
        }
        os << '\n';
    }
}

}  // namespace mimo
