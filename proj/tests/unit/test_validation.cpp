#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/validation.hpp"

using namespace mimo;

TEST(Ks, StatisticOnKnownSample) {
    // sample {0.1, 0.5, 0.9} against U(0,1): gap 1/3 - 0.1 at the first point
    const double D = ks_statistic({0.9, 0.1, 0.5}, [](double x) { return x; });
    EXPECT_NEAR(D, 0.2333333333333333, 1e-15);
}

TEST(Ks, PValueAsymptotics) {
    EXPECT_NEAR(ks_p_value(0.0, 1000), 1.0, 1e-12);
    EXPECT_LT(ks_p_value(0.5, 1000), 1e-12);
    // lambda = 1.3581 is the 5% point of the Kolmogorov distribution
    const std::size_t n = 1000000;
    const double sn = std::sqrt(double(n));
    const double D = 1.3581 / (sn + 0.12 + 0.11 / sn);
    EXPECT_NEAR(ks_p_value(D, n), 0.05, 1e-4);
}

TEST(Validation, ReportShape) {
    ExperimentConfig cfg;
    ValidationOptions opt;
    opt.only = {1, 3};
    const auto rep = run_validation(cfg, opt);
    ASSERT_EQ(rep.results.size(), 2u);
    EXPECT_TRUE(rep.all_passed());
    const std::string t = rep.text();
    EXPECT_NE(t.find("seed: 1"), std::string::npos);
    EXPECT_NE(t.find(config_digest(cfg)), std::string::npos);
    EXPECT_NE(t.find("AC1  PASS"), std::string::npos);
    EXPECT_NE(t.find("AC3  PASS"), std::string::npos);
    EXPECT_NE(t.find("summary: 2/2 criteria passed"), std::string::npos);
    EXPECT_EQ(rep.text(), run_validation(cfg, opt).text());
}

TEST(Validation, SabotageFails) {
    ExperimentConfig cfg;
    ValidationOptions opt;
    opt.only = {1};
    opt.sabotage = true;
    const auto rep = run_validation(cfg, opt);
    EXPECT_FALSE(rep.all_passed());
    EXPECT_NE(rep.text().find("AC1  FAIL"), std::string::npos);
}

TEST(Validation, KnownUnattainableIsSubset) {
    for (int id : known_unattainable()) {
        EXPECT_GE(id, 1);
        EXPECT_LE(id, criterion_count);
    }
}
