#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/errors.hpp"
#include "mimo/experiment.hpp"
#include "mimo/monte_carlo.hpp"

using namespace mimo;

namespace {

Eigen::MatrixXcd random_complex(int r, int c, unsigned seed) {
    std::srand(seed);
    return Eigen::MatrixXcd::Random(r, c);
}

struct Small {
    ExperimentConfig cfg;
    PointSetup setup;
    Scenario scenario;
};

Small small_case(std::size_t M, std::size_t K, double R_lambda, std::uint64_t seed = 3) {
    Small s;
    s.cfg.K = K;
    s.cfg.seed = seed;
    s.setup = setup_point(s.cfg, sample_bpp(M, R_lambda * s.cfg.wavelength(), seed));
    s.scenario = scenario_for(s.setup, s.cfg);
    return s;
}

McOptions opts(std::size_t trials, unsigned threads, std::uint64_t seed = 5) {
    McOptions o;
    o.trials = trials;
    o.threads = threads;
    o.seed = seed;
    return o;
}

}  // namespace

TEST(Zf, OrthogonalColumns) {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(4, 2);
    G(0, 0) = 1.5;
    G(1, 0) = cdouble(0, 1.5);
    G(2, 1) = 1.5;
    const auto s = zf_snr(G, 3.0);
    EXPECT_NEAR(s(0), 3.0 * 4.5, 1e-12);
    EXPECT_NEAR(s(1), 3.0 * 2.25, 1e-12);
    const auto g1 = random_complex(5, 1, 4);
    EXPECT_NEAR(zf_snr(g1, 2.0)(0), 2.0 * g1.squaredNorm(), 1e-12);
}

TEST(Zf, ThreeByTwoCofactor) {
    const auto G = random_complex(3, 2, 7);
    const Eigen::Matrix2cd W = G.adjoint() * G;
    const cdouble det = W(0, 0) * W(1, 1) - W(0, 1) * W(1, 0);
    // diagonal of the inverse is cofactor over determinant
    const double inv00 = (W(1, 1) / det).real(), inv11 = (W(0, 0) / det).real();
    const auto s = zf_snr(G, 4.0);
    EXPECT_NEAR(s(0), 4.0 / inv00, 1e-12 * s(0));
    EXPECT_NEAR(s(1), 4.0 / inv11, 1e-12 * s(1));
}

TEST(Zf, RankDeficient) {
    Eigen::MatrixXcd G(3, 2);
    G.col(0) = random_complex(3, 1, 1);
    G.col(1) = 2.0 * G.col(0);
    EXPECT_THROW(zf_snr(G, 1.0), SingularMatrix);
}

TEST(Mrc, SingleUserAndNaiveLoops) {
    const auto g1 = random_complex(4, 1, 2);
    EXPECT_NEAR(mrc_snr(g1, 0, 3.0), 3.0 * g1.squaredNorm(), 1e-12);
    EXPECT_DOUBLE_EQ(mrc_snr(g1, 0, 6.0), 2.0 * mrc_snr(g1, 0, 3.0));

    const auto C = random_complex(4, 4, 11), A = random_complex(4, 3, 12), H = random_complex(3, 2, 13);
    const double beta[2] = {0.4, 1.7};
    Eigen::VectorXd b(2);
    b << beta[0], beta[1];
    const auto G = compose_channel(C, A, H, b).G;
    // columns by explicit loops
    cdouble g[2][4] = {};
    for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 4; ++m) {
            for (int a = 0; a < 4; ++a)
                for (int q = 0; q < 3; ++q) g[k][m] += C(m, a) * A(a, q) * H(q, k);
            g[k][m] *= std::sqrt(beta[k]);
        }
    const double snr = 2.5;
    for (int k = 0; k < 2; ++k) {
        double sig = 0.0;
        for (int m = 0; m < 4; ++m) sig += std::norm(g[k][m]);
        cdouble cross = 0.0;
        for (int m = 0; m < 4; ++m) cross += std::conj(g[k][m]) * g[1 - k][m];
        const double ref = snr * sig * sig / (snr * std::norm(cross) + sig);
        EXPECT_NEAR(mrc_snr(G, k, snr), ref, 1e-12 * ref);
    }
    EXPECT_THROW(mrc_snr(G, 2, snr), InvalidArgument);
}

TEST(Parallel, PairwiseSumAndForLoop) {
    std::vector<double> x(1001);
    double naive = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) naive += x[i] = 1.0 / (1.0 + i);
    EXPECT_NEAR(pairwise_sum(x.data(), x.size()), naive, 1e-13);
    EXPECT_EQ(pairwise_sum(x.data(), 0), 0.0);

    std::vector<std::atomic<int>> hits(500);
    parallel_for(500, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw NumericFailure("x"); }), NumericFailure);
}

TEST(Mc, BitIdenticalAcrossThreads) {
    const auto s = small_case(20, 2, 1.0);
    const auto r1 = mc_rate(s.scenario, opts(600, 1));
    const auto ser1 = mc_ser(s.scenario, opts(600, 1));
    for (unsigned t : {2u, 3u, 7u}) {
        const auto rt = mc_rate(s.scenario, opts(600, t));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(rt.sum.value), std::bit_cast<std::uint64_t>(r1.sum.value));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(rt.sum.std_error), std::bit_cast<std::uint64_t>(r1.sum.std_error));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(mc_ser(s.scenario, opts(600, t)).value),
                  std::bit_cast<std::uint64_t>(ser1.value));
    }
    EXPECT_EQ(r1.sum.trials, 600u);
    EXPECT_EQ(r1.sum.seed, 5u);
    EXPECT_EQ(r1.sum.config_digest, s.scenario.digest);
    EXPECT_FALSE(s.scenario.digest.empty());
    ASSERT_EQ(r1.per_user.size(), 2u);
    EXPECT_NEAR(r1.per_user[0].value + r1.per_user[1].value, r1.sum.value, 1e-12);
}

TEST(Mc, StandardErrorShrinks) {
    const auto s = small_case(20, 2, 1.0);
    const double a = mc_rate(s.scenario, opts(4000, 0)).sum.std_error;
    const double b = mc_rate(s.scenario, opts(8000, 0)).sum.std_error;
    EXPECT_NEAR(a / b, std::sqrt(2.0), 0.15);
}

TEST(Mc, SerAndOutageLimits) {
    auto s = small_case(12, 2, 1.0);
    s.scenario.link.snr_ut = 1e-14;
    EXPECT_NEAR(mc_ser(s.scenario, opts(200, 0)).value, 1.0, 1e-6);
    s.scenario.link.snr_ut = 30.0;
    s.scenario.link.snr_th = 1e-300;
    EXPECT_EQ(mc_outage(s.scenario, opts(200, 0)).value, 0.0);
    s.scenario.link.snr_th = 1e300;
    EXPECT_EQ(mc_outage(s.scenario, opts(200, 0)).value, 1.0);
    double prev = 2.0;
    for (double snr : {1.0, 3.0, 10.0, 30.0}) {
        s.scenario.link.snr_ut = snr;
        const double v = mc_ser(s.scenario, opts(500, 0)).value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Mc, RateAboveLowerBound) {
    const auto s = small_case(20, 2, 1.0);
    const auto r = mc_rate(s.scenario, opts(3000, 0));
    const double lb = rate_lower_bound(s.setup.link, s.setup.spectrum.tau).sum();
    EXPECT_GE(r.sum.value + 3.0 * r.sum.std_error, lb);
}

TEST(Mc, GainIdenticalAndPositive) {
    const auto s = small_case(8, 1, 1.0);
    const auto same = mc_gain(s.scenario, s.scenario, opts(500, 0));
    EXPECT_EQ(same.value, 0.0);
    ExperimentConfig cfg;
    const double lam = cfg.wavelength();
    const auto ref = scenario_for(setup_point(cfg, sample_bpp(cfg.M_min, lam, 1)), cfg);
    for (int l = 0; l < 20; ++l) {
        const auto big = scenario_for(setup_point(cfg, sample_bpp(10, 2.0 * lam, 100 + l)), cfg);
        EXPECT_GT(mc_gain(big, ref, opts(1000, 0, l)).value, 0.0) << l;
    }
}

TEST(Mc, RawDump) {
    const auto s = small_case(10, 2, 1.0);
    std::ostringstream os;
    McOptions o = opts(3, 1);
    o.raw = &os;
    mc_ser(s.scenario, o);
    const std::string text = os.str();
    EXPECT_EQ(text.rfind("trial,metric,value\n", 0), 0u);
    EXPECT_GT(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Histogram, TraceAndDeterminism) {
    const double lam = ExperimentConfig{}.wavelength();
    HistogramOptions h;
    const auto a = eigen_histogram(2, lam, 120, 4, h);
    ASSERT_EQ(a.spectra.size(), 120u);
    for (std::size_t i = 0; i < a.spectra.size(); ++i)
        EXPECT_NEAR(a.spectra[i].sum(), a.traces[i], 1e-10 * a.traces[i]);
    h.threads = 3;
    const auto b = eigen_histogram(2, lam, 120, 4, h);
    for (std::size_t i = 0; i < a.spectra.size(); ++i) EXPECT_EQ(a.spectra[i], b.spectra[i]);

    std::vector<double> v;
    for (const auto& s : a.spectra) v.push_back(s(1));
    const auto hist = bin_values(v, 10);
    ASSERT_EQ(hist.edges.size(), 11u);
    std::size_t total = 0;
    for (auto c : hist.counts) total += c;
    EXPECT_EQ(total, v.size());
}
