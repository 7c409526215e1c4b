#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "compdist/rng.hpp"
#include "compdist/stat_tests.hpp"

namespace {

TEST(ChiSquarePValue, ReferenceValues) {
    EXPECT_NEAR(compdist::chi_square_p_value(3.841458820694124, 1), 0.05, 1e-12);
    EXPECT_NEAR(compdist::chi_square_p_value(10.0, 4), 0.04042768199451279, 1e-12);
    EXPECT_DOUBLE_EQ(compdist::chi_square_p_value(0.0, 3), 1.0);
}

TEST(GoodnessOfFit, PerfectFitAndPooling) {
    const std::vector<double> probs{0.25, 0.25, 0.5};
    const auto perfect = compdist::chi_square_goodness_of_fit(std::vector<double>{25, 25, 50}, probs);
    EXPECT_DOUBLE_EQ(perfect.statistic, 0.0);
    EXPECT_DOUBLE_EQ(perfect.p_value, 1.0);
    EXPECT_EQ(perfect.cells, 3u);
    // Two sparse cells get pooled together.
    const auto pooled = compdist::chi_square_goodness_of_fit(std::vector<double>{48, 48, 2, 2},
                                                             std::vector<double>{0.48, 0.48, 0.02, 0.02});
    EXPECT_EQ(pooled.cells, 2u);
    const auto off = compdist::chi_square_goodness_of_fit(std::vector<double>{90, 10}, std::vector<double>{0.5, 0.5});
    EXPECT_NEAR(off.statistic, 64.0, 1e-12);
    EXPECT_LT(off.p_value, 1e-10);
}

TEST(Independence, ProductTableHasZeroStatistic) {
    const std::vector<double> table{10, 20, 30, 20, 40, 60};
    const auto r = compdist::chi_square_independence(table, 2, 3);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.degrees_of_freedom, 2.0);
    const std::vector<double> skew{50, 0, 0, 50};
    EXPECT_LT(compdist::chi_square_independence(skew, 2, 2).p_value, 1e-10);
}

TEST(Homogeneity, IdenticalHistograms) {
    const std::vector<double> a{30, 40, 50};
    const auto r = compdist::chi_square_homogeneity(a, a);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
}

TEST(Kolmogorov, AsymptoticPValue) {
    // Exact finite-n Kolmogorov tail probabilities at n = 1000.
    EXPECT_NEAR(compdist::kolmogorov_p_value(1000, 0.02), 0.8109, 0.01);
    EXPECT_NEAR(compdist::kolmogorov_p_value(1000, 0.043), 0.0481, 0.003);
    EXPECT_NEAR(compdist::kolmogorov_p_value(1000, 0.06), 0.00143, 2e-4);
}

TEST(Kolmogorov, UniformSampleAgainstUniformCdf) {
    compdist::RngStream rng(77);
    std::vector<double> u(5000);
    for (auto& x : u) x = rng.uniform();
    std::sort(u.begin(), u.end());
    const auto r = compdist::ks_test(u);
    EXPECT_EQ(r.n, 5000u);
    EXPECT_GT(r.p_value, 1e-3);
    std::vector<double> squashed(u);
    for (auto& x : squashed) x = x * x;
    EXPECT_LT(compdist::ks_test(squashed).p_value, 1e-10);
}

}  // namespace
