#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mimo/channel.hpp"
#include "mimo/coupling.hpp"
#include "mimo/errors.hpp"
#include "mimo/geometry.hpp"
#include "support/oracle.hpp"

using namespace mimo;

namespace {

Eigen::MatrixXcd random_complex(int r, int c, unsigned seed) {
    std::srand(seed);
    return Eigen::MatrixXcd::Random(r, c);
}

}  // namespace

TEST(Channel, Directions) {
    const auto one = draw_directions(1, 4);
    ASSERT_EQ(one.size(), 1u);
    const auto a = draw_directions(100000, 5);
    const auto b = draw_directions(100000, 5);
    double s = 0.0, s2 = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        EXPECT_EQ(a.angles[q].phi, b.angles[q].phi);
        EXPECT_EQ(a.angles[q].theta, b.angles[q].theta);
        EXPECT_GE(a.angles[q].phi, 0.0);
        EXPECT_LT(a.angles[q].phi, 2.0 * oracle::pi);
        EXPECT_GE(a.angles[q].theta, -oracle::pi / 2);
        EXPECT_LE(a.angles[q].theta, oracle::pi / 2);
        const double c = std::cos(a.angles[q].phi);
        s += c;
        s2 += c * c;
    }
    const double n = static_cast<double>(a.size());
    const double se = std::sqrt((s2 / n - (s / n) * (s / n)) / n);
    EXPECT_LT(std::fabs(s / n), 3.0 * se);
}

TEST(Channel, SteeringElement) {
    const double lambda = 0.12;
    EXPECT_EQ(steering_element(0.3, 1.0, 2.0, 0.0, lambda), cdouble(1.0, 0.0));
    EXPECT_EQ(steering_element(0.0, 1.0, 2.0, 0.7, lambda), cdouble(1.0, 0.0));
    const cdouble q = steering_element(lambda / 4, 0.0, 0.0, oracle::pi / 2, lambda);
    EXPECT_NEAR(q.real(), 0.0, 1e-15);
    EXPECT_NEAR(q.imag(), -1.0, 1e-15);
    EXPECT_NEAR(std::abs(steering_element(0.77, 2.1, 0.4, -0.3, lambda)), 1.0, 1e-15);
    EXPECT_THROW(steering_element(0.1, 0, 0, 0.1, 0.0), InvalidArgument);
}

TEST(Channel, SteeringMatrix) {
    const double lambda = 0.12;
    const auto l = sample_bpp(2, lambda, 6);
    const auto dirs = draw_directions(5, 9);
    const auto A = steering_matrix(l, dirs, lambda);
    ASSERT_EQ(A.rows(), 2);
    ASSERT_EQ(A.cols(), 5);
    for (int m = 0; m < 2; ++m)
        for (int q = 0; q < 5; ++q)
            EXPECT_EQ(A(m, q), steering_element(l.positions[m].d, l.positions[m].psi, dirs.angles[q].phi,
                                                dirs.angles[q].theta, lambda));

    IncidentDirections flat = draw_directions(7, 1);
    for (auto& d : flat.angles) d.theta = 0.0;
    const auto big = sample_bpp(30, lambda, 2);
    const auto ones = steering_matrix(big, flat, lambda);
    EXPECT_EQ((ones - Eigen::MatrixXcd::Ones(30, 7)).norm(), 0.0);
    const auto Ab = steering_matrix(big, dirs, lambda);
    for (int q = 0; q < 5; ++q) EXPECT_NEAR(Ab.col(q).norm(), std::sqrt(30.0), 1e-12);
}

TEST(Channel, SmallScaleMoments) {
    const auto H = draw_small_scale(1000, 100, 17);
    EXPECT_EQ(H, draw_small_scale(1000, 100, 17));
    const double n = static_cast<double>(H.size());
    const cdouble mean = H.sum() / n;
    const double var = H.cwiseAbs2().sum() / n;
    const double var_se = std::sqrt((H.cwiseAbs2().array() - var).square().sum() / n / n);
    EXPECT_LT(std::abs(var - 1.0), 3.0 * var_se);
    // each of re, im has variance 1/2, so the mean has standard error sqrt(1/2n)
    EXPECT_LT(std::fabs(mean.real()), 3.0 * std::sqrt(0.5 / n));
    EXPECT_LT(std::fabs(mean.imag()), 3.0 * std::sqrt(0.5 / n));
}

TEST(Channel, LargeScale) {
    LargeScaleParams p;
    p.sigma_dB = 0.0;
    EXPECT_EQ(large_scale_factor(p.l_resist, 1.0, p), 1.0);
    EXPECT_NEAR(large_scale_factor(100.0, 1.0, p), std::pow(10.0, -3.8), 1e-18);
    LargeScaleParams q;
    const auto beta = draw_large_scale(200, q, 3);
    EXPECT_TRUE((beta.array() > 0.0).all());
    EXPECT_EQ(beta, draw_large_scale(200, q, 3));
    LargeScaleParams bad;
    bad.l_min = 5.0;
    EXPECT_THROW(draw_large_scale(2, bad, 1), InvalidArgument);
}

TEST(Channel, Compose) {
    // C = I, all-ones A, D = I: identical rows equal to the column sums of H
    const Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Ones(3, 4);
    const auto H = draw_small_scale(4, 2, 1);
    const auto s = compose_channel(C, A, H, Eigen::VectorXd::Ones(2));
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(s.G(m, k) - H.col(k).sum()), 0.0, 1e-14);

    const auto h1 = draw_small_scale(4, 1, 2);
    const double n1 = compose_channel(C, A, h1, Eigen::VectorXd::Constant(1, 1.0)).G.norm();
    const double n4 = compose_channel(C, A, h1, Eigen::VectorXd::Constant(1, 4.0)).G.norm();
    EXPECT_NEAR(n4, 2.0 * n1, 1e-14 * n4);

    const auto Cr = random_complex(4, 4, 1), Ar = random_complex(4, 3, 2), Hr = random_complex(3, 2, 3);
    Eigen::VectorXd beta(2);
    beta << 0.3, 2.0;
    const auto g = compose_channel(Cr, Ar, Hr, beta).G;
    for (int m = 0; m < 4; ++m)
        for (int k = 0; k < 2; ++k) {
            cdouble acc = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int q = 0; q < 3; ++q) acc += Cr(m, a) * Ar(a, q) * Hr(q, k);
            acc *= std::sqrt(beta(k));
            EXPECT_NEAR(std::abs(g(m, k) - acc), 0.0, 1e-13);
        }
    EXPECT_THROW(compose_channel(Cr, Ar, Hr, Eigen::VectorXd::Ones(3)), InvalidArgument);
}

TEST(Channel, EtaArithmetic) {
    Eigen::MatrixXcd P(2, 2);
    P << 1.0, 0.5, 0.5, 1.0;
    EXPECT_NEAR(matrix_correlation_coefficient(P), 0.25, 1e-15);
    EXPECT_EQ(matrix_correlation_coefficient(Eigen::MatrixXcd::Identity(4, 4)), 0.0);
    EXPECT_NEAR(matrix_correlation_coefficient(Eigen::MatrixXcd::Ones(3, 3)), 2.0, 1e-15);
    EXPECT_NEAR(matrix_correlation_coefficient(7.5 * P), 0.25, 1e-15);
    EXPECT_THROW(matrix_correlation_coefficient(Eigen::MatrixXcd::Zero(2, 2)), InvalidArgument);
}

TEST(Channel, CorrelationOrthogonalColumns) {
    // columns of a scaled unitary: eigenvalues are the squared column norms
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = cdouble(0, 1);
    A(2, 2) = 3.0;
    const auto s = correlation(Eigen::MatrixXcd::Identity(3, 3), A);
    EXPECT_NEAR(s.tau(0), 1.0, 1e-14);
    EXPECT_NEAR(s.tau(1), 4.0, 1e-14);
    EXPECT_NEAR(s.tau(2), 9.0, 1e-14);
    EXPECT_EQ(s.eta, 0.0);
}

TEST(Channel, SpectrumProperties) {
    const CouplingParams p;
    for (std::size_t M : {12u, 150u}) {
        const auto l = sample_bpp(M, 8.0 * p.wavelength, 60 + M);
        const auto C = coupling_matrix(impedance_matrix(l, p), p);
        const auto A = steering_matrix(l, draw_directions(100, 3), p.wavelength);
        const auto s = correlation(C, A);
        EXPECT_TRUE(s.Psi.isApprox(s.Psi.adjoint(), 1e-12));
        for (Eigen::Index i = 1; i < s.tau.size(); ++i) EXPECT_LE(s.tau(i - 1), s.tau(i));
        EXPECT_GE(s.tau.minCoeff(), 0.0);
        const double tr = (C * A * A.adjoint() * C.adjoint()).trace().real();
        EXPECT_NEAR(s.tau.sum(), tr, 1e-8 * tr);
        EXPECT_GE(s.eta, 0.0);
        if (M > 100) {
            // rank of A A^H is at most P; the aperture is wide enough to reach it
            int small = 0;
            for (Eigen::Index i = 0; i < s.tau.size(); ++i) small += s.tau(i) <= 1e-8 * s.tau.maxCoeff();
            EXPECT_EQ(small, static_cast<int>(M) - 100);
        }
    }
}

TEST(Channel, SpectrumDump) {
    std::ostringstream os;
    Eigen::VectorXd t(2);
    t << 1.5, 2.0;
    write_spectrum_csv(os, t);
    EXPECT_EQ(os.str(), "tau_index,tau_value\n1,1.5\n2,2\n");
    std::ostringstream sm;
    write_correlation_summary(sm, 20, 0.12, 1.5, 0.25);
    EXPECT_EQ(sm.str(), "M,R,zeta,eta\n20,0.12,1.5,0.25\n");
}
