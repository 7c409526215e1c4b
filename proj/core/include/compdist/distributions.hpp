#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "compdist/log_real.hpp"
#include "compdist/simplex.hpp"

namespace compdist {

/// Dirichlet concentration vector α, n >= 2, with log B(α) cached.
class DirichletParams {
public:
    explicit DirichletParams(std::vector<double> alpha);

    std::size_t size() const { return alpha_.size(); }
    std::span<const double> alpha() const { return alpha_; }
    double operator[](std::size_t i) const { return alpha_[i]; }
    double total() const { return total_; }
    double log_normalizer() const { return log_normalizer_; }

private:
    std::vector<double> alpha_;
    double total_;
    double log_normalizer_;
};

/// Independent rates λᵢ ~ Gamma(rᵢ, θ) sharing one scale θ (mean rᵢθ).
class GammaMixtureParams {
public:
    explicit GammaMixtureParams(std::vector<double> shapes, double scale = 1.0);

    std::size_t size() const { return shapes_.size(); }
    std::span<const double> shapes() const { return shapes_; }
    double scale() const { return scale_; }
    /// R = Σ rᵢ
    double total_shape() const { return total_shape_; }
    /// p = θ / (1 + θ)
    double success_probability() const { return scale_ / (1.0 + scale_); }

private:
    std::vector<double> shapes_;
    double scale_;
    double total_shape_;
};

class CountVector {
public:
    explicit CountVector(std::vector<std::uint64_t> counts);

    std::size_t size() const { return counts_.size(); }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t operator[](std::size_t i) const { return counts_[i]; }
    std::uint64_t total() const { return total_; }

    friend bool operator==(const CountVector&, const CountVector&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_;
};

/// Beta-Binomial(m; a, b): a plays r₁ and b the merged R − r₁.
class BetaBinomialParams {
public:
    BetaBinomialParams(double a, double b, std::uint64_t trials);

    double a() const { return a_; }
    double b() const { return b_; }
    std::uint64_t trials() const { return trials_; }

private:
    double a_;
    double b_;
    std::uint64_t trials_;
};

double dirichlet_log_pdf(const DirichletParams& params, const Composition& x);

/// Push-forward of Dirichlet(α) under yᵢ = xᵢ / xₙ.
double inverted_dirichlet_log_pdf(const DirichletParams& params, const RatioVector& y);

/// Push-forward of Dirichlet(α) under the additive log-ratio yᵢ = log(xᵢ / xₙ).
double alr_dirichlet_log_pdf(const DirichletParams& params, const LogRatioVector& y);

/// Shape-scale Gamma density; -inf outside the support.
double gamma_log_pdf(double shape, double scale, double x);

double poisson_log_pmf(double rate, std::uint64_t k);

/// NB(R, p) with pmf C(m + R − 1, m) (1 − p)^R p^m, mean R p / (1 − p).
/// Note p multiplies p^m here; several libraries use the complementary convention.
double negative_binomial_log_pmf(double total_shape, double p, std::uint64_t m);

double multinomial_log_pmf(std::uint64_t m, const Composition& probs, const CountVector& x);

/// Dirichlet-Multinomial with concentration r = params.shapes(); the scale is not used.
double dirichlet_multinomial_log_pmf(const GammaMixtureParams& params, std::uint64_t m,
                                     const CountVector& x);

double beta_binomial_log_pmf(const BetaBinomialParams& params, std::uint64_t k);

/// Joint mass of (X_c = k, S = m) under the Poisson-Gamma model: NB(R, p) at m times
/// Beta-Binomial(m; r_c, R − r_c) at k. Defined for every pair k <= m including m = 0,
/// so the pair masses sum to one.
double normalized_nb_log_pmf(const GammaMixtureParams& params, std::size_t component,
                             std::uint64_t k, std::uint64_t m);

/// Smallest M with Σ_{m > M} NB(R, p)(m) < tail_tolerance, found by accumulating the pmf.
std::uint64_t nb_truncation_bound(double total_shape, double p, double tail_tolerance = 1e-12);

/// Σ_{m > bound} NB(R, p)(m), as 1 − (compensated partial sum).
double nb_tail_mass(double total_shape, double p, std::uint64_t bound);

struct ValueMass {
    LogReal mass;
    std::uint64_t truncation_bound;
};

/// Mass of the ratio value k/m, aggregating every pair (jk₀, jm₀) with jm₀ <= bound, where
/// k₀/m₀ is k/m in lowest terms. Without an explicit bound the NB tail bound for 1e-12 is used.
ValueMass normalized_nb_value_pmf(const GammaMixtureParams& params, std::size_t component,
                                  std::uint64_t k, std::uint64_t m,
                                  std::optional<std::uint64_t> bound = std::nullopt);

}  // namespace compdist
