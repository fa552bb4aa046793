#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/errors.hpp"
#include "mimo/rng.hpp"
#include "mimo/special.hpp"
#include "support/oracle.hpp"

using namespace mimo;

TEST(Special, SiCiKnownValues) {
    EXPECT_EQ(sine_integral(0.0), 0.0);
    EXPECT_NEAR(sine_integral(1.0), 0.946083070367, 1e-12);
    EXPECT_NEAR(cosine_integral(1.0), 0.337403922901, 1e-12);
    EXPECT_LT(std::fabs(sine_integral(100.0) - pi / 2), 0.01);
    EXPECT_NEAR(cosine_integral(1e-4), euler_gamma + std::log(1e-4), 1e-8);
    EXPECT_GT(cosine_integral(100.0), -0.01);
    EXPECT_LT(cosine_integral(100.0), 0.01);
}

TEST(Special, SiCiMatchQuadratureOnLogGrid) {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double x = std::pow(10.0, -3.0 + 6.0 * k / 199.0);
        double s, c;
        sici(x, s, c);
        worst = std::max(worst, std::fabs(s - oracle::si(x)) / std::max(1.0, std::fabs(s)));
        worst = std::max(worst, std::fabs(c - oracle::ci(x)) / std::max(1.0, std::fabs(c)));
        EXPECT_EQ(s, sine_integral(x));
        EXPECT_EQ(c, cosine_integral(x));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Special, SiCiContinuousAtCrossover) {
    const double below = std::nextafter(sici_crossover, 0.0);
    EXPECT_NEAR(sine_integral(below), sine_integral(sici_crossover), 1e-11);
    EXPECT_NEAR(cosine_integral(below), cosine_integral(sici_crossover), 1e-11);
}

TEST(Special, SiCiDomain) {
    EXPECT_THROW(sine_integral(-1.0), InvalidArgument);
    EXPECT_THROW(sine_integral(NAN), InvalidArgument);
    EXPECT_THROW(cosine_integral(0.0), InvalidArgument);
    EXPECT_THROW(cosine_integral(-2.0), InvalidArgument);
}

TEST(Special, Erfc) {
    EXPECT_EQ(mimo::erfc(0.0), 1.0);
    EXPECT_NEAR(mimo::erfc(-0.7), 2.0 - mimo::erfc(0.7), 1e-15);
    const double tail = 2.0 / std::sqrt(oracle::pi)
                        * oracle::integrate([](double t) { return std::exp(-t * t); }, 1.0, 12.0);
    EXPECT_NEAR(mimo::erfc(1.0), tail, 1e-13);
    EXPECT_NEAR(mimo::erfc(1.0), 0.157299207050, 1e-12);
    double prev = 2.0;
    for (double x = -6.0; x <= 6.0; x += 0.05) {
        const double v = mimo::erfc(x);
        // saturates at 2 in double near x = -6
        if (x > -5.5) EXPECT_LT(v, prev);
        EXPECT_NEAR(v + std::erf(x), 1.0, 4e-16);
        prev = v;
    }
    EXPECT_THROW(mimo::erfc(INFINITY), InvalidArgument);
}

TEST(Special, LnGamma) {
    EXPECT_NEAR(ln_gamma(1.0), 0.0, 1e-15);
    EXPECT_NEAR(ln_gamma(5.0), std::log(24.0), 1e-14);
    EXPECT_NEAR(ln_gamma(0.5), 0.5 * std::log(oracle::pi), 1e-14);
    // Euler integral at 3.3 where the integrand is smooth enough, recurrence down to 1.3 and up to 10.3
    const double g33 = oracle::integrate([](double t) { return std::pow(t, 2.3) * std::exp(-t); }, 0.0, 80.0);
    const double base = std::log(g33 / (1.3 * 2.3));
    double ref = base;
    for (double z = 1.3; z < 10.0; z += 1.0) ref += std::log(z);
    EXPECT_NEAR(ln_gamma(1.3), base, 1e-12);
    EXPECT_NEAR(ln_gamma(10.3), ref, 1e-12 * std::fabs(ref));
    EXPECT_THROW(ln_gamma(0.0), InvalidArgument);
}

TEST(Special, LnGammaRecurrence) {
    for (double x = 0.5; x <= 50.0; x += 0.25)
        EXPECT_NEAR(ln_gamma(x + 1.0), ln_gamma(x) + std::log(x), 1e-12 * std::max(1.0, std::fabs(ln_gamma(x + 1.0))));
}

TEST(Special, Shadowing) {
    EXPECT_EQ(sample_lognormal_shadowing(0.0, 3), 1.0);
    Rng rng = make_rng(11, Stream::shadowing);
    const int n = 100000;
    std::vector<double> db(n);
    double mean_ln = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = sample_lognormal_shadowing(8.0, rng);
        EXPECT_GT(z, 0.0);
        db[i] = 10.0 * std::log10(z);
        mean_ln += std::log(z);
    }
    mean_ln /= n;
    double m = 0.0, v = 0.0;
    for (double x : db) m += x;
    m /= n;
    for (double x : db) v += (x - m) * (x - m);
    const double sd = std::sqrt(v / (n - 1));
    const double sd_ln = sd * std::log(10.0) / 10.0;
    EXPECT_LT(std::fabs(mean_ln), 3.0 * sd_ln / std::sqrt(n));
    EXPECT_NEAR(sd, 8.0, 0.1);
    EXPECT_EQ(sample_lognormal_shadowing(8.0, 42), sample_lognormal_shadowing(8.0, 42));
}
