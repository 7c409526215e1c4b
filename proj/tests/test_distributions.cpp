#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "compdist/distributions.hpp"
#include "compdist/errors.hpp"
#include "compdist/numeric.hpp"
#include "compdist/verification.hpp"

namespace {

using compdist::BetaBinomialParams;
using compdist::Composition;
using compdist::ContractViolation;
using compdist::CountVector;
using compdist::DirichletParams;
using compdist::DomainError;
using compdist::GammaMixtureParams;
using compdist::LogRatioVector;
using compdist::RatioVector;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(Params, Validation) {
    EXPECT_THROW(DirichletParams({1.0}), ContractViolation);
    EXPECT_THROW(DirichletParams({1.0, 0.0}), DomainError);
    EXPECT_THROW(DirichletParams({1.0, INFINITY}), DomainError);
    EXPECT_THROW(GammaMixtureParams({1.0, 1.0}, 0.0), DomainError);
    EXPECT_THROW(GammaMixtureParams({2.0}, 1.0), ContractViolation);
    EXPECT_THROW(BetaBinomialParams(0.0, 1.0, 3), DomainError);
    EXPECT_THROW(CountVector({}), ContractViolation);
    EXPECT_NEAR(GammaMixtureParams({1.0, 1.0}, 1.0).success_probability(), 0.5, 1e-16);
    EXPECT_NEAR(GammaMixtureParams({1.0, 1.5}, 3.0).total_shape(), 2.5, 1e-16);
}

TEST(Dirichlet, Examples) {
    EXPECT_NEAR(compdist::dirichlet_log_pdf(DirichletParams({1, 1}), Composition({0.3, 0.7})), 0.0, 1e-15);
    EXPECT_NEAR(compdist::dirichlet_log_pdf(DirichletParams({1, 1, 1}), Composition({0.1, 0.6, 0.3})),
                std::log(2.0), 1e-15);
    EXPECT_NEAR(compdist::dirichlet_log_pdf(DirichletParams({2, 2}), Composition({0.5, 0.5})), std::log(1.5),
                1e-15);
    EXPECT_THROW(compdist::dirichlet_log_pdf(DirichletParams({1, 1}), Composition({0.2, 0.3, 0.5})),
                 ContractViolation);
}

TEST(InvertedDirichlet, Examples) {
    EXPECT_NEAR(compdist::inverted_dirichlet_log_pdf(DirichletParams({1, 1}), RatioVector({1.0})), std::log(0.25),
                1e-15);
    EXPECT_NEAR(compdist::inverted_dirichlet_log_pdf(DirichletParams({1, 1, 1}), RatioVector({1.0, 1.0})),
                std::log(2.0 / 27.0), 1e-15);
    EXPECT_THROW(compdist::inverted_dirichlet_log_pdf(DirichletParams({1, 1}), RatioVector({1.0, 1.0})),
                 ContractViolation);
}

TEST(InvertedDirichlet, HighPrecisionReference) {
    const double frozen = -2.336944620185060344169576009471656810099;
    EXPECT_LE(rel(compdist::inverted_dirichlet_log_pdf(DirichletParams({0.7, 2.2, 1.4}), RatioVector({0.3, 2.5})),
                  frozen),
              1e-14);
}

TEST(AlrDirichlet, Examples) {
    EXPECT_NEAR(compdist::alr_dirichlet_log_pdf(DirichletParams({1, 1}), LogRatioVector({0.0})), std::log(0.25),
                1e-15);
    const double frozen = -2.548293420898082711695108115961005752022;
    EXPECT_LE(rel(compdist::alr_dirichlet_log_pdf(DirichletParams({0.7, 2.2, 1.4}), LogRatioVector({-0.4, 1.1})),
                  frozen),
              1e-14);
}

TEST(AlrDirichlet, IntegratesToOneOnAGrid) {
    const DirichletParams alpha({1, 1});
    const double lo = -40.0;
    const double hi = 40.0;
    const int steps = 80000;
    const double h = (hi - lo) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        sum += w * std::exp(compdist::alr_dirichlet_log_pdf(alpha, LogRatioVector({lo + i * h})));
    }
    EXPECT_NEAR(sum * h, 1.0, 1e-8);
}

TEST(ChangeOfVariables, BothChartsAtRandomPoints) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> log_alpha(std::log(0.2), std::log(20.0));
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int i = 0; i < 300; ++i) {
            std::vector<double> a(n), y(n - 1), ey(n - 1);
            for (auto& v : a) v = std::exp(log_alpha(gen));
            for (std::size_t j = 0; j + 1 < n; ++j) {
                y[j] = coord(gen);
                ey[j] = std::exp(y[j]);
            }
            const DirichletParams alpha(a);
            const RatioVector r(ey);
            const LogRatioVector l(y);
            const double via_ratio =
                compdist::dirichlet_log_pdf(alpha, compdist::ratio_inverse(r)) +
                compdist::log_det_jacobian_ratio_inverse(r, n);
            const double via_alr =
                compdist::dirichlet_log_pdf(alpha, compdist::log_ratio_inverse(l)) +
                compdist::log_det_jacobian_log_ratio_inverse(l, n);
            EXPECT_LE(compdist::log_domain_rel_error(compdist::inverted_dirichlet_log_pdf(alpha, r), via_ratio), 1e-12);
            EXPECT_LE(compdist::log_domain_rel_error(compdist::alr_dirichlet_log_pdf(alpha, l), via_alr), 1e-12);
        }
    }
}

TEST(NegativeBinomial, Examples) {
    EXPECT_NEAR(compdist::negative_binomial_log_pmf(1, 0.5, 0), std::log(0.5), 1e-15);
    EXPECT_NEAR(compdist::negative_binomial_log_pmf(1, 0.5, 3), 4 * std::log(0.5), 1e-15);
    const double frozen = -6.440007800869447872869403430923485180028;
    EXPECT_LE(rel(compdist::negative_binomial_log_pmf(2.5, 0.3, 7), frozen), 1e-14);
    EXPECT_THROW(compdist::negative_binomial_log_pmf(1, 0.0, 1), DomainError);
    EXPECT_THROW(compdist::negative_binomial_log_pmf(1, 1.0, 1), DomainError);
    EXPECT_THROW(compdist::negative_binomial_log_pmf(0, 0.5, 1), DomainError);
}

TEST(NegativeBinomial, TruncatedSumIsOne) {
    double sum = 0.0;
    for (std::uint64_t m = 0; m <= 500; ++m) sum += std::exp(compdist::negative_binomial_log_pmf(2.5, 0.3, m));
    EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(NegativeBinomial, TruncationBound) {
    const std::uint64_t bound = compdist::nb_truncation_bound(2.0, 0.5, 1e-12);
    EXPECT_LT(compdist::nb_tail_mass(2.0, 0.5, bound), 1e-12);
    EXPECT_GE(compdist::nb_tail_mass(2.0, 0.5, bound - 1), 1e-12);
}

TEST(Multinomial, Examples) {
    EXPECT_DOUBLE_EQ(compdist::multinomial_log_pmf(0, Composition({0.3, 0.7}), CountVector({0, 0})), 0.0);
    EXPECT_NEAR(compdist::multinomial_log_pmf(2, Composition({0.5, 0.5}), CountVector({1, 1})), std::log(0.5), 1e-15);
    double sum = 0.0;
    for (const auto& x : compdist::enumerate_compositions(3, 3)) {
        sum += std::exp(compdist::multinomial_log_pmf(3, Composition({0.2, 0.3, 0.5}), x));
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_THROW(compdist::multinomial_log_pmf(3, Composition({0.5, 0.5}), CountVector({1, 1})), ContractViolation);
    EXPECT_THROW(compdist::multinomial_log_pmf(2, Composition({0.5, 0.5}), CountVector({1, 1, 0})),
                 ContractViolation);
}

TEST(DirichletMultinomial, Examples) {
    const GammaMixtureParams flat3({1, 1, 1});
    for (const auto& x : compdist::enumerate_compositions(3, 2)) {
        EXPECT_NEAR(compdist::dirichlet_multinomial_log_pmf(flat3, 2, x), std::log(1.0 / 6.0), 1e-14);
    }
    EXPECT_NEAR(compdist::dirichlet_multinomial_log_pmf(GammaMixtureParams({1, 1}), 4, CountVector({1, 3})),
                std::log(0.2), 1e-14);
    const GammaMixtureParams r({2, 1, 0.5});
    double sum = 0.0;
    for (const auto& x : compdist::enumerate_compositions(3, 6)) {
        sum += std::exp(compdist::dirichlet_multinomial_log_pmf(r, 6, x));
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    const double frozen = -3.215961425880147953276010281729337625669;
    EXPECT_LE(rel(compdist::dirichlet_multinomial_log_pmf(r, 6, CountVector({3, 2, 1})), frozen), 1e-14);
    EXPECT_THROW(compdist::dirichlet_multinomial_log_pmf(r, 5, CountVector({3, 2, 1})), ContractViolation);
}

TEST(DirichletMultinomial, SymmetricUnderJointPermutation) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> r(4);
        for (auto& v : r) v = unif(gen);
        for (const auto& x : compdist::enumerate_compositions(4, 5)) {
            std::vector<std::size_t> perm{0, 1, 2, 3};
            std::shuffle(perm.begin(), perm.end(), gen);
            std::vector<double> rp(4);
            std::vector<std::uint64_t> xp(4);
            for (std::size_t i = 0; i < 4; ++i) {
                rp[i] = r[perm[i]];
                xp[i] = x[perm[i]];
            }
            const double a = compdist::dirichlet_multinomial_log_pmf(GammaMixtureParams(r), 5, x);
            const double b = compdist::dirichlet_multinomial_log_pmf(GammaMixtureParams(rp), 5, CountVector(xp));
            EXPECT_LE(compdist::log_domain_rel_error(a, b), 1e-12);
        }
    }
}

TEST(BetaBinomial, Examples) {
    EXPECT_NEAR(compdist::beta_binomial_log_pmf(BetaBinomialParams(1, 1, 5), 3), std::log(1.0 / 6.0), 1e-15);
    const double frozen = -2.869901910836303528037703239550189101683;
    EXPECT_LE(rel(compdist::beta_binomial_log_pmf(BetaBinomialParams(2.5, 0.7, 9), 4), frozen), 1e-14);
    EXPECT_DOUBLE_EQ(compdist::beta_binomial_log_pmf(BetaBinomialParams(2, 3, 0), 0), 0.0);
    EXPECT_THROW(compdist::beta_binomial_log_pmf(BetaBinomialParams(1, 1, 5), 6), DomainError);
}

TEST(BetaBinomial, EqualsMergedDirichletMultinomial) {
    const std::vector<double> shapes{1, 1, 1};
    const double rest = 2.0;
    std::vector<double> marginal(5, 0.0);
    for (const auto& x : compdist::enumerate_compositions(3, 4)) {
        marginal[x[0]] += std::exp(compdist::dirichlet_multinomial_log_pmf(GammaMixtureParams(shapes), 4, x));
    }
    for (std::uint64_t k = 0; k <= 4; ++k) {
        const double bb = std::exp(compdist::beta_binomial_log_pmf(BetaBinomialParams(1, rest, 4), k));
        EXPECT_LE(rel(marginal[k], bb), 1e-10);
    }
}

TEST(NormalizedNb, Examples) {
    const GammaMixtureParams p({1, 1}, 1.0);
    EXPECT_NEAR(compdist::normalized_nb_log_pmf(p, 0, 0, 0), std::log(0.25), 1e-15);
    EXPECT_NEAR(compdist::normalized_nb_log_pmf(p, 0, 0, 1), std::log(0.125), 1e-15);
    EXPECT_NEAR(compdist::normalized_nb_log_pmf(p, 0, 1, 1), std::log(0.125), 1e-15);
    EXPECT_THROW(compdist::normalized_nb_log_pmf(p, 0, 3, 2), DomainError);
    EXPECT_THROW(compdist::normalized_nb_log_pmf(p, 2, 0, 2), ContractViolation);
}

TEST(NormalizedNb, DoubleSumIsOne) {
    const GammaMixtureParams p({1, 1}, 1.0);
    double sum = 0.0;
    for (std::uint64_t m = 0; m <= 400; ++m) {
        for (std::uint64_t k = 0; k <= m; ++k) sum += std::exp(compdist::normalized_nb_log_pmf(p, 0, k, m));
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(NormalizedNb, ValuePmfAggregatesEquivalentPairs) {
    const GammaMixtureParams p({1, 1}, 1.0);
    const auto half = compdist::normalized_nb_value_pmf(p, 0, 1, 2, 10);
    const auto half_again = compdist::normalized_nb_value_pmf(p, 0, 3, 6, 10);
    EXPECT_EQ(half.truncation_bound, 10u);
    EXPECT_DOUBLE_EQ(half.mass.log(), half_again.mass.log());
    double direct = 0.0;
    for (std::uint64_t j = 1; j <= 5; ++j) direct += std::exp(compdist::normalized_nb_log_pmf(p, 0, j, 2 * j));
    EXPECT_LE(rel(half.mass.linear(), direct), 1e-13);
    EXPECT_THROW(compdist::normalized_nb_value_pmf(p, 0, 0, 0, 10), DomainError);
    EXPECT_THROW(compdist::normalized_nb_value_pmf(p, 0, 3, 2, 10), DomainError);
}

TEST(GammaAndPoisson, LogDensities) {
    EXPECT_NEAR(compdist::gamma_log_pdf(1.0, 2.0, 1.0), std::log(0.5) - 0.5, 1e-15);
    EXPECT_EQ(compdist::gamma_log_pdf(2.0, 1.0, -1.0), -INFINITY);
    EXPECT_NEAR(compdist::poisson_log_pmf(1.0, 0), -1.0, 1e-15);
    EXPECT_NEAR(compdist::poisson_log_pmf(4.0, 2), std::log(8.0) - 4.0, 1e-14);
}

}  // namespace
