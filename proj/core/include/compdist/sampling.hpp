#pragma once

#include <cstddef>
#include <cstdint>

#include "compdist/distributions.hpp"
#include "compdist/rng.hpp"
#include "compdist/simplex.hpp"

namespace compdist {

/// Gamma(shape, scale), mean shape · scale. Marsaglia–Tsang squeeze/rejection for
/// shape >= 1; smaller shapes draw at shape + 1 and multiply by U^(1/shape).
double gamma_sample(double shape, double scale, RngStream& rng);

/// log of a Gamma(shape, 1) draw. Stays finite where the linear draw would underflow.
double log_standard_gamma_sample(double shape, RngStream& rng);

/// Poisson(rate). Sequential inversion for rate <= 30, Hörmann's PTRS above.
/// rate = 0 returns 0.
std::uint64_t poisson_sample(double rate, RngStream& rng);

/// Binomial(trials, p) by Knuth's Beta-splitting recursion, finishing with Bernoulli sums.
std::uint64_t binomial_sample(std::uint64_t trials, double p, RngStream& rng);

/// Normalized independent Gamma(αᵢ, 1) draws.
Composition dirichlet_sample(const DirichletParams& params, RngStream& rng);

/// Λ ~ Gamma(R, θ), then Poisson(Λ). Marginally NB(R, θ / (1 + θ)).
std::uint64_t negative_binomial_sample_via_mixture(double total_shape, double scale, RngStream& rng);

/// Sequential binomial thinning; the result always totals m.
CountVector multinomial_sample(std::uint64_t m, const Composition& probs, RngStream& rng);

/// π ~ Dirichlet(r), then Multinomial(m, π).
CountVector dirichlet_multinomial_sample(const GammaMixtureParams& params, std::uint64_t m,
                                         RngStream& rng);

std::uint64_t beta_binomial_sample(const BetaBinomialParams& params, RngStream& rng);

struct CountPair {
    std::uint64_t k;
    std::uint64_t m;
};

/// Runs the full Poisson-Gamma model (λᵢ ~ Gamma(rᵢ, θ), Xᵢ ~ Poisson(λᵢ)) and
/// returns (X_component, S).
CountPair normalized_nb_sample(const GammaMixtureParams& params, std::size_t component,
                               RngStream& rng);

}  // namespace compdist
