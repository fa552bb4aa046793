#include "mimo/channel.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mimo/errors.hpp"
#include "mimo/special.hpp"

namespace mimo {

IncidentDirections draw_directions(std::size_t P, std::uint64_t seed, ElevationLaw law) {
    if (P < 1) throw InvalidArgument("draw_directions: P must be at least 1");
    Rng rng = make_rng(seed, Stream::directions);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IncidentDirections dirs;
    dirs.angles.reserve(P);
    for (std::size_t q = 0; q < P; ++q) {
        Direction d;
        d.phi = 2.0 * pi * u(rng);
        const double v = u(rng);
        d.theta = (law == ElevationLaw::uniform) ? pi * (v - 0.5) : std::asin(2.0 * v - 1.0);
        dirs.angles.push_back(d);
    }
    return dirs;
}

cdouble steering_element(double d, double psi, double phi, double theta, double lambda) {
    detail::check_positive(lambda, "lambda");
    const double s = std::sin(theta);
    if (d == 0.0 || s == 0.0) return {1.0, 0.0};
    const double phase = -2.0 * pi * d / lambda * s * std::cos(phi - psi);
    return {std::cos(phase), std::sin(phase)};
}

Eigen::MatrixXcd steering_matrix(const AntennaLayout& layout, const IncidentDirections& dirs,
                                 double lambda) {
    detail::check_positive(lambda, "lambda");
    const auto M = static_cast<Eigen::Index>(layout.size());
    const auto P = static_cast<Eigen::Index>(dirs.size());
    Eigen::MatrixXcd A(M, P);
    for (Eigen::Index m = 0; m < M; ++m) {
        const auto& pos = layout.positions[m];
        for (Eigen::Index q = 0; q < P; ++q)
            A(m, q) = steering_element(pos.d, pos.psi, dirs.angles[q].phi, dirs.angles[q].theta,
                                       lambda);
    }
    return A;
}

Eigen::MatrixXcd draw_small_scale(std::size_t P, std::size_t K, Rng& rng) {
    if (P < 1 || K < 1) throw InvalidArgument("draw_small_scale: P and K must be positive");
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd H(P, K);
    // column-major fill keeps column k independent of K
    for (Eigen::Index k = 0; k < H.cols(); ++k)
        for (Eigen::Index q = 0; q < H.rows(); ++q) {
            const double re = n(rng);
            const double im = n(rng);
            H(q, k) = cdouble(re, im);
        }
    return H;
}

Eigen::MatrixXcd draw_small_scale(std::size_t P, std::size_t K, std::uint64_t seed) {
    Rng rng = make_rng(seed, Stream::small_scale);
    return draw_small_scale(P, K, rng);
}

double large_scale_factor(double l, double z, const LargeScaleParams& p) {
    return z / std::pow(l / p.l_resist, p.exponent);
}

Eigen::VectorXd draw_large_scale(std::size_t K, const LargeScaleParams& p, std::uint64_t seed) {
    if (K < 1) throw InvalidArgument("draw_large_scale: K must be positive");
    detail::check_positive(p.l_resist, "l_resist");
    detail::check_positive(p.exponent, "pathloss exponent");
    if (!(p.l_min >= p.l_resist) || !(p.l_max >= p.l_min))
        throw InvalidArgument("draw_large_scale: need l_resist <= l_min <= l_max");
    Rng rng = make_rng(seed, Stream::large_scale);
    std::uniform_real_distribution<double> u(p.l_min, p.l_max);
    Eigen::VectorXd beta(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double l = (p.l_max > p.l_min) ? u(rng) : p.l_min;
        const double z = sample_lognormal_shadowing(p.sigma_dB, rng);
        beta(k) = large_scale_factor(l, z, p);
    }
    return beta;
}

ChannelSet compose_channel(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A,
                           const Eigen::MatrixXcd& H, const Eigen::VectorXd& beta) {
    if (C.rows() != C.cols() || C.cols() != A.rows() || A.cols() != H.rows()
        || H.cols() != beta.size())
        throw InvalidArgument("compose_channel: dimension mismatch");
    if ((beta.array() <= 0.0).any()) throw InvalidArgument("compose_channel: beta must be positive");
    ChannelSet s{C, A, H, beta, {}};
    s.G = (C * A) * (H * beta.cwiseSqrt().asDiagonal());
    return s;
}

Eigen::VectorXd hermitian_spectrum(const Eigen::MatrixXcd& X, int* clamped) {
    const Eigen::MatrixXcd S = 0.5 * (X + X.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericFailure(fmt::format("Hermitian eigensolver failed (n = {}, |X| = {:.3g})",
                                         X.rows(), X.norm()));
    Eigen::VectorXd tau = es.eigenvalues();
    const double top = tau.size() ? tau(tau.size() - 1) : 0.0;
    int n = 0;
    for (Eigen::Index i = 0; i < tau.size(); ++i)
        if (tau(i) < eigen_clamp_ratio * top) {
            tau(i) = 0.0;
            ++n;
        }
    if (clamped) *clamped = n;
    return tau;
}

CorrelationSpectrum correlation(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A) {
    if (C.rows() != C.cols() || C.cols() != A.rows())
        throw InvalidArgument("correlation: dimension mismatch");
    CorrelationSpectrum s;
    const Eigen::MatrixXcd CA = C * A;
    s.Psi = CA * CA.adjoint();
    s.tau = hermitian_spectrum(s.Psi, &s.clamped);
    s.eta = matrix_correlation_coefficient(s.Psi);
    return s;
}

double matrix_correlation_coefficient(const Eigen::MatrixXcd& Psi) {
    if (Psi.rows() != Psi.cols()) throw InvalidArgument("eta: matrix must be square");
    const double diag = Psi.diagonal().cwiseAbs2().sum();
    if (!(diag > 0.0)) throw InvalidArgument("eta: zero diagonal");
    double off = 0.0;
    for (Eigen::Index j = 0; j < Psi.cols(); ++j)
        for (Eigen::Index i = 0; i < Psi.rows(); ++i)
            if (i != j) off += std::norm(Psi(i, j));
    // Tr[Psi Psi^H] / sum |Psi_ii|^2 - 1, written without the cancelling subtraction
    return off / diag;
}

void write_spectrum_csv(std::ostream& os, const Eigen::VectorXd& tau) {
    os << "tau_index,tau_value\n";
    for (Eigen::Index i = 0; i < tau.size(); ++i) fmt::print(os, "{},{:.17g}\n", i + 1, tau(i));
}

void write_correlation_summary(std::ostream& os, std::size_t M, double R, double zeta, double eta) {
    fmt::print(os, "M,R,zeta,eta\n{},{:.17g},{:.17g},{:.17g}\n", M, R, zeta, eta);
}

}  // namespace mimo
