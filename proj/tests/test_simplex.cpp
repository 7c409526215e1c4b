#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "compdist/errors.hpp"
#include "compdist/simplex.hpp"
#include "compdist/verification.hpp"

namespace {

using compdist::Composition;
using compdist::ContractViolation;
using compdist::DomainError;
using compdist::LogRatioVector;
using compdist::RatioVector;

void expect_entries(std::span<const double> got, const std::vector<double>& want, double tol = 1e-15) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "index " << i;
}

Composition random_composition(std::size_t n, std::mt19937_64& gen) {
    std::exponential_distribution<double> e;
    std::vector<double> w(n);
    for (auto& x : w) x = e(gen) + 1e-3;
    return Composition::from_weights(w);
}

TEST(Composition, Validation) {
    EXPECT_NO_THROW(Composition({0.2, 0.3, 0.5}));
    EXPECT_THROW(Composition({1.0}), ContractViolation);
    EXPECT_THROW(Composition({0.5, 0.6}), ContractViolation);
    EXPECT_THROW(Composition({0.0, 1.0}), ContractViolation);
    EXPECT_THROW(Composition({-0.1, 1.1}), ContractViolation);
    EXPECT_THROW(Composition({NAN, 0.5}), ContractViolation);
    EXPECT_THROW(Composition::from_weights({0.0, 0.0}), DomainError);
    EXPECT_THROW(Composition::from_weights({1.0, -1.0, 2.0}), DomainError);
}

TEST(Composition, FromWeightsNormalizes) {
    const auto x = Composition::from_weights({1.0, 3.0});
    expect_entries(x.entries(), {0.25, 0.75});
}

TEST(RatioVector, Validation) {
    EXPECT_THROW(RatioVector({0.0}), ContractViolation);
    EXPECT_THROW(RatioVector({-1.0, 2.0}), ContractViolation);
    EXPECT_THROW(RatioVector({INFINITY}), ContractViolation);
    EXPECT_THROW(LogRatioVector({NAN}), ContractViolation);
    EXPECT_NEAR(RatioVector({0.4, 0.6}).z(), 2.0, 1e-15);
}

TEST(RatioForward, Examples) {
    expect_entries(compdist::ratio_forward(Composition({0.5, 0.5})).entries(), {1.0});
    expect_entries(compdist::ratio_forward(Composition({0.2, 0.3, 0.5})).entries(), {0.4, 0.6});
    expect_entries(compdist::ratio_forward(Composition({0.25, 0.25, 0.25, 0.25})).entries(), {1, 1, 1});
}

TEST(RatioInverse, Examples) {
    expect_entries(compdist::ratio_inverse(RatioVector({1.0})).entries(), {0.5, 0.5});
    expect_entries(compdist::ratio_inverse(RatioVector({0.4, 0.6})).entries(), {0.2, 0.3, 0.5});
}

TEST(LogRatioForward, Examples) {
    expect_entries(compdist::log_ratio_forward(Composition({0.5, 0.5})).entries(), {0.0});
    expect_entries(compdist::log_ratio_forward(Composition({0.2, 0.3, 0.5})).entries(),
                   {std::log(0.4), std::log(0.6)});
    const double e = std::exp(1.0);
    for (std::size_t n = 2; n <= 6; ++n) {
        std::vector<double> x(n, 1.0 / (static_cast<double>(n) - 1.0 + e));
        x[0] = e / (static_cast<double>(n) - 1.0 + e);
        const auto y = compdist::log_ratio_forward(Composition(x));
        EXPECT_NEAR(y[0], 1.0, 1e-14);
    }
}

TEST(LogRatioInverse, Examples) {
    expect_entries(compdist::log_ratio_inverse(LogRatioVector({0.0})).entries(), {0.5, 0.5});
    expect_entries(compdist::log_ratio_inverse(LogRatioVector({std::log(0.4), std::log(0.6)})).entries(),
                   {0.2, 0.3, 0.5});
}

TEST(LogRatioInverse, ExtremeCoordinatesStayFinite) {
    const LogRatioVector y({700.0, 700.0});
    EXPECT_TRUE(std::isinf(y.k()) || y.k() > 1e300);
    EXPECT_NEAR(y.log_k(), 700.0 + std::log(2.0), 1e-12);
    const auto x = compdist::log_ratio_inverse(y);
    EXPECT_NEAR(x[0], 0.5, 1e-15);
    EXPECT_NEAR(x[1], 0.5, 1e-15);
    EXPECT_GT(x[2], 0.0);
    EXPECT_NEAR(std::log(x[2]), -700.0 - std::log(2.0), 1e-12);
}

TEST(RoundTrips, RandomCompositions) {
    std::mt19937_64 gen(17);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (int i = 0; i < 1000; ++i) {
            const auto x = random_composition(n, gen);
            const auto via_ratio = compdist::ratio_inverse(compdist::ratio_forward(x));
            const auto via_alr = compdist::log_ratio_inverse(compdist::log_ratio_forward(x));
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_LE(std::abs(via_ratio[j] - x[j]), 1e-12 * x[j]);
                EXPECT_LE(std::abs(via_alr[j] - x[j]), 1e-12 * x[j]);
            }
        }
    }
}

TEST(RoundTrips, ChartConsistency) {
    // The two charts differ only by a coordinatewise log.
    std::mt19937_64 gen(18);
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_composition(2 + static_cast<std::size_t>(i % 6), gen);
        const auto r = compdist::ratio_forward(x);
        const auto l = compdist::log_ratio_forward(x);
        for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NEAR(std::log(r[j]), l[j], 1e-13);
    }
}

TEST(Jacobians, ClosedFormExamples) {
    EXPECT_NEAR(compdist::log_det_jacobian_ratio_inverse(RatioVector({1.0}), 2), -2 * std::log(2.0), 1e-15);
    EXPECT_NEAR(compdist::log_det_jacobian_ratio_inverse(RatioVector({0.4, 0.6}), 3), -3 * std::log(2.0), 1e-15);
    EXPECT_NEAR(compdist::log_det_jacobian_log_ratio_inverse(LogRatioVector({0.0}), 2), -2 * std::log(2.0), 1e-15);
    EXPECT_NEAR(compdist::log_det_jacobian_log_ratio_inverse(LogRatioVector({0.0, 0.0}), 3), -3 * std::log(3.0),
                1e-15);
    EXPECT_THROW(compdist::log_det_jacobian_ratio_inverse(RatioVector({1.0}), 3), ContractViolation);
    EXPECT_THROW(compdist::log_det_jacobian_log_ratio_inverse(LogRatioVector({1.0, 2.0}), 2), ContractViolation);
}

TEST(Jacobians, ChainIdentityBetweenCharts) {
    // y_alr = log y_ratio, so log|J_alr| = log|J_ratio|(exp y) + Σ y.
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(i % 5);
        std::vector<double> y(d), e(d);
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            y[j] = unif(gen);
            e[j] = std::exp(y[j]);
            sum += y[j];
        }
        const double alr = compdist::log_det_jacobian_log_ratio_inverse(LogRatioVector(y), d + 1);
        const double ratio = compdist::log_det_jacobian_ratio_inverse(RatioVector(e), d + 1);
        EXPECT_LE(std::abs(alr - (ratio + sum)), 1e-10 * std::max(1.0, std::abs(alr)));
    }
}

TEST(Jacobians, MatchFiniteDifferenceDeterminant) {
    std::mt19937_64 gen(20);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int i = 0; i < 100; ++i) {
            std::vector<double> y(n - 1);
            for (auto& v : y) v = unif(gen);
            const auto fd = compdist::finite_difference_jacobian(compdist::TransformKind::kLogRatio, y);
            const double oracle = std::log(std::abs(compdist::lu_determinant(fd, n - 1)));
            const double closed = compdist::log_det_jacobian_log_ratio_inverse(LogRatioVector(y), n);
            EXPECT_LE(std::abs(std::expm1(closed - oracle)), 1e-6);
        }
    }
}

}  // namespace
