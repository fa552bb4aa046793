#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/closed_form.hpp"
#include "mimo/errors.hpp"
#include "mimo/experiment.hpp"
#include "mimo/validation.hpp"
#include "support/oracle.hpp"

using namespace mimo;

namespace {

const std::vector<double> six{1, 2, 3, 4, 6, 9};

double integral(const EigenDensity& f, const std::function<double(double)>& w, double hi = 400.0) {
    return oracle::integrate([&](double x) { return f.pdf(x) * w(x); }, 0.0, hi, 2.0);
}

SystemParams link(std::size_t K, double snr, double snr_th = 0.5) {
    SystemParams p;
    p.snr_ut = snr;
    p.beta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(K), 0.05);
    p.snr_th = snr_th;
    return p;
}

}  // namespace

TEST(Spectrum, PrepareDropsAndSpreads) {
    const std::vector<double> raw{5.0, 1.0 + 2e-9, 0.0, 1.0, 1e-12, 1.0 + 1e-9, 2.5};
    const auto p = prepare_spectrum(raw);
    EXPECT_EQ(p.diagnostics.input_size, raw.size());
    EXPECT_EQ(p.diagnostics.dropped, 2u);
    EXPECT_EQ(p.diagnostics.spread, 3u);
    ASSERT_EQ(p.tau.size(), 5u);
    EXPECT_NO_THROW(check_spectrum(p.tau));
    EXPECT_EQ(p.tau[3], 2.5);
    EXPECT_EQ(p.tau[4], 5.0);
    for (std::size_t i = 1; i < p.tau.size(); ++i) EXPECT_GE(p.tau[i] - p.tau[i - 1], spectrum_min_gap * 5.0);
    // the cluster keeps its centre
    EXPECT_NEAR((p.tau[0] + p.tau[1] + p.tau[2]) / 3.0, 1.0 + 1e-9, 1e-12);
    EXPECT_LT(p.diagnostics.max_shift, 2.0 * spectrum_min_gap);
}

TEST(Spectrum, CheckRejectsDegenerate) {
    EXPECT_THROW(check_spectrum({1.0, 1.0}), DegenerateSpectrum);
    EXPECT_THROW(check_spectrum({1.0, 1.0 + 1e-9}), DegenerateSpectrum);
    EXPECT_THROW(check_spectrum({-1.0, 2.0}), DegenerateSpectrum);
    EXPECT_NO_THROW(check_spectrum({1.0, 2.0}));
}

TEST(Density, SingleNormalisedAndDecays) {
    const auto f = EigenDensity::single({1, 2, 4});
    EXPECT_NEAR(integral(f, [](double) { return 1.0; }), 1.0, 1e-6);
    EXPECT_NEAR(f.moment(0), 1.0, 1e-12);
    EXPECT_LT(f.pdf(200.0), 1e-20);
    for (int i = 0; i < 1000; ++i) EXPECT_GE(f.pdf(0.05 * i), 0.0);
}

TEST(Density, SingleMatchesSampledQuadraticForm) {
    // h^H diag(tau) h is a sum of exponentials with means tau
    std::mt19937_64 g(3);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = 1.0 * e(g) + 2.0 * e(g) + 4.0 * e(g);
    const auto f = EigenDensity::single({1, 2, 4});
    EXPECT_LT(ks_statistic(xs, [&](double x) { return f.cdf(x); }), 0.02);
}

TEST(Density, TraceIdentity) {
    EXPECT_NEAR(expected_xi({1, 3}), 4.0, 1e-12);
    EXPECT_NEAR(EigenDensity::single(six).mean(), 25.0, 1e-10);
    EXPECT_EQ(ergodic_gain(six, six, 10.0, 0.3), 0.0);
}

TEST(Density, MultiReducesToSingle) {
    const std::vector<double> t{0.5, 1.0, 2.5, 4.0};
    const auto s = EigenDensity::single(t);
    const auto m = EigenDensity::multi(t, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::fabs(s.pdf(0.3 * i) - m.pdf(0.3 * i)));
    EXPECT_LT(worst, 1e-9);
}

TEST(Density, MultiNormalisedAndPositive) {
    for (std::size_t K : {2u, 3u}) {
        const auto f = EigenDensity::multi(six, K);
        EXPECT_NEAR(integral(f, [](double) { return 1.0; }), 1.0, 1e-5);
        for (int i = 0; i < 1000; ++i) EXPECT_GE(f.pdf(0.1 * i), -1e-12);
        // mean of the unordered eigenvalues is the trace of Psi
        EXPECT_NEAR(f.mean(), 25.0, 1e-9);
    }
}

TEST(Density, MultiMatchesSampledEigenvalues) {
    Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd>(six.data(), 6);
    std::vector<double> xs;
    for (int t = 0; t < 10000; ++t) {
        const auto H = draw_small_scale(6, 2, derive_seed(9, Stream::small_scale, t));
        const Eigen::MatrixXcd W = H.adjoint() * tau.asDiagonal() * H;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W);
        xs.push_back(es.eigenvalues()(0));
        xs.push_back(es.eigenvalues()(1));
    }
    const auto f = EigenDensity::multi(six, 2);
    EXPECT_LT(ks_statistic(xs, [&](double x) { return f.cdf(x); }), 0.02);
}

TEST(Density, InverseMeanAgainstQuadrature) {
    // the log term taken at j = 1 reproduces E[1/x]; summing it over every column does not
    for (std::size_t K : {1u, 2u, 3u}) {
        const auto f = EigenDensity::multi(six, K);
        const double q = integral(f, [](double x) { return 1.0 / x; });
        EXPECT_NEAR(f.inv_mean(), q, 1e-10 * q) << K;
        if (K > 1) EXPECT_GT(std::fabs(f.inv_mean(true) - q), 1e-3 * q);
    }
    EXPECT_NEAR(EigenDensity::multi(six, 2).inv_mean(), 0.0688389897315081, 1e-13);
    EXPECT_NEAR(EigenDensity::multi(six, 2).inv_mean(true), 0.0671054665321731, 1e-13);
}

TEST(Density, ScaleCovariance) {
    std::vector<double> big;
    for (double t : six) big.push_back(1e5 * t);
    const auto f = EigenDensity::multi(six, 2), g = EigenDensity::multi(big, 2);
    EXPECT_NEAR(g.mean(), 1e5 * f.mean(), 1e-9 * g.mean());
    EXPECT_NEAR(g.inv_mean(), 1e-5 * f.inv_mean(), 1e-9 * g.inv_mean());
    EXPECT_NEAR(g.cdf(5e5), f.cdf(5.0), 1e-12);
    EXPECT_NEAR(g.pdf(3e5) * 1e5, f.pdf(3.0), 1e-12);
}

TEST(Density, LogNormaliserTwoWays) {
    for (std::size_t K : {1u, 2u, 4u}) {
        const auto f = EigenDensity::multi(six, K);
        EXPECT_NEAR(f.log_normaliser(), f.log_normaliser_product_form(), 1e-10 * std::fabs(f.log_normaliser()));
    }
}

TEST(Density, LargeSpreadSpectrum) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-20.0, 3.0);
    std::vector<double> raw;
    for (int i = 0; i < 96; ++i) raw.push_back(std::exp(u(g)));
    const auto p = prepare_spectrum(raw);
    const auto f = EigenDensity::multi(p.tau, 10);
    EXPECT_NEAR(f.moment(0), 1.0, 1e-10);
    double tr = 0.0;
    for (double t : p.tau) tr += t;
    EXPECT_NEAR(f.mean(), tr, 1e-8 * tr);
}

TEST(Outage, ClosedTermsAgainstQuadrature) {
    const auto f = EigenDensity::multi(six, 2);
    const double q = oracle::integrate([&](double x) { return f.pdf(x); }, 0.0, 5.0, 0.25);
    EXPECT_NEAR(f.cdf_closed(5.0), q, 1e-10);
    EXPECT_NEAR(f.cdf(5.0), q, 1e-10);
    EXPECT_NEAR(q, 0.03579204, 1e-8);
    // the n+y-s-3 exponent is far off
    EXPECT_GT(std::fabs(f.cdf_closed(5.0, OutageExponent::minus_three) - q), 0.5);
}

TEST(Outage, Limits) {
    const auto p = link(2, 30.0);
    EXPECT_LT(outage_closed_form(link(2, 30.0, 1e-12), six), 1e-12);
    EXPECT_NEAR(outage_closed_form(link(2, 30.0, 1e6), six), 1.0, 1e-9);
    const auto f = EigenDensity::multi(six, 2);
    EXPECT_NEAR(outage_closed_form(p, f), outage_quadrature(p, f), 1e-6);
}

TEST(Ser, LimitsAndMonotone) {
    EXPECT_NEAR(ser_closed_form(link(2, 1e-12), six), 1.0, 1e-5);
    const auto f = EigenDensity::multi(six, 2);
    double prev = 1.0;
    for (int i = 0; i < 10; ++i) {
        const auto p = link(2, std::pow(10.0, i / 3.0));
        const double v = ser_closed_form(p, f);
        EXPECT_LT(v, prev);
        EXPECT_NEAR(ser_closed_terms(p, f), v, 1e-6);
        prev = v;
    }
}

TEST(Rate, SingleUserAndHighSnrSlope) {
    const auto p = link(1, 50.0);
    const auto f = EigenDensity::single(six);
    EXPECT_NEAR(rate_lower_bound(p, six)(0), std::log2(1.0 + 50.0 * 0.05 / f.inv_mean()), 1e-12);
    auto hi = link(3, 1000.0), hi2 = link(3, 2000.0);
    const auto r1 = rate_lower_bound(hi, six), r2 = rate_lower_bound(hi2, six);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r2(k) - r1(k), 1.0, 0.1);
}

TEST(Stability, RelativePerturbation) {
    std::vector<double> t2 = six;
    for (std::size_t i = 0; i < t2.size(); ++i) t2[i] *= 1.0 + (i % 2 ? 1e-6 : -1e-6);
    const auto p = link(2, 40.0);
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(a); };
    EXPECT_LT(rel(rate_lower_bound(p, six).sum(), rate_lower_bound(p, t2).sum()), 1e-3);
    EXPECT_LT(rel(ser_closed_form(p, six), ser_closed_form(p, t2)), 1e-3);
    EXPECT_LT(rel(outage_closed_form(p, six), outage_closed_form(p, t2)), 1e-3);
    EXPECT_LT(rel(expected_xi(six), expected_xi(t2)), 1e-3);
}

TEST(Asymptotic, TraceCorners) {
    const int M = 6, P = 4;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
    const auto A = steering_matrix(sample_bpp(M, 0.3, 2), draw_directions(P, 3), 0.12);
    EXPECT_NEAR(channel_trace(A, I), double(M * P), 1e-12);
    const cdouble c(0.5, 1.5);
    EXPECT_NEAR(asymptotic_snr(A, c * I, 2.0, 0.1), std::norm(c) * asymptotic_snr(A, I, 2.0, 0.1), 1e-12);

    SystemParams one = link(1, 7.0);
    const Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(M, P);
    EXPECT_NEAR(asymptotic_rate(one, ones, I), std::log2(1.0 + 7.0 * 0.05 * M * P), 1e-12);
    SystemParams five = link(5, 7.0);
    EXPECT_NEAR(asymptotic_rate(five, ones, I), 5.0 * asymptotic_rate(one, ones, I), 1e-12);

    EXPECT_NEAR(asymptotic_ser(link(2, 1e-300), ones, I), 1.0, 1e-12);
    EXPECT_LT(asymptotic_ser(link(2, 7.0), 1e4 * A, I), 1e-300);

    EXPECT_EQ(asymptotic_gain(A, I, A, I, 3.0, 0.2), 0.0);
    const int Mmin = 2;
    const Eigen::MatrixXcd Ahat = A.topRows(Mmin);
    EXPECT_NEAR(asymptotic_gain(A, I, Ahat, Eigen::MatrixXcd::Identity(Mmin, Mmin), 3.0, 0.2),
                3.0 * 0.2 * P * (M - Mmin), 1e-12);
}

TEST(Asymptotic, GainMatchesClosedFormAtLargeM) {
    ExperimentConfig cfg;
    const double lam = cfg.wavelength();
    const auto big = setup_point(cfg, sample_bpp(200, 3.0 * lam, 5));
    const auto ref = setup_point(cfg, sample_bpp(2, lam, 6));
    const double g = ergodic_gain(big.spectrum.tau, ref.spectrum.tau, big.link.snr_ut, big.link.beta(0));
    const double ga = asymptotic_gain(big.A, big.C, ref.A, ref.C, big.link.snr_ut, big.link.beta(0));
    EXPECT_NEAR(ga, g, 0.05 * g);
}

TEST(Asymptotic, DirectionAgainstFiniteM) {
    // the trace formula ignores the ZF loss, so it sits above the bound and below the SER
    ExperimentConfig cfg;
    const auto p = setup_point(cfg, sample_bpp(200, cfg.wavelength(), 5));
    EXPECT_GT(asymptotic_rate(p.link, p.A, p.C), rate_lower_bound(p.link, p.spectrum.tau).sum());
    ExperimentConfig c2 = cfg;
    c2.K = 2;
    const auto q = setup_point(c2, sample_bpp(200, cfg.wavelength(), 5));
    EXPECT_LT(asymptotic_ser(q.link, q.A, q.C), ser_closed_form(q.link, q.spectrum.tau));
}

TEST(SystemParamsCheck, Rejects) {
    SystemParams p = link(2, 1.0);
    p.snr_ut = 0.0;
    EXPECT_THROW(p.check(), InvalidArgument);
    p = link(2, 1.0);
    p.beta(1) = -1.0;
    EXPECT_THROW(p.check(), InvalidArgument);
    p = link(6, 1.0);
    EXPECT_THROW(rate_lower_bound(p, six), DegenerateSpectrum);
}
