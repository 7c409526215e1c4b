#include "compdist/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "compdist/errors.hpp"
#include "compdist/numeric.hpp"

namespace compdist {
namespace {

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) throw DomainError(std::string(what) + " must be positive and finite");
}

// Marsaglia–Tsang, shape >= 1, unit scale.
double marsaglia_tsang(double shape, RngStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t poisson_inversion(double rate, RngStream& rng) {
    constexpr std::uint64_t kCap = 1000;
    while (true) {
        const double u = rng.uniform();
        double pmf = std::exp(-rate);
        double cdf = pmf;
        std::uint64_t k = 0;
        while (u > cdf && k < kCap) {
            ++k;
            pmf *= rate / static_cast<double>(k);
            cdf += pmf;
        }
        // Only reachable when rounding left the accumulated cdf below u.
        if (k < kCap) return k;
    }
}

// Hörmann (1993), transformed rejection with squeeze.
std::uint64_t poisson_ptrs(double rate, RngStream& rng) {
    const double log_rate = std::log(rate);
    const double b = 0.931 + 2.53 * std::sqrt(rate);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
        const double rhs = -rate + k * log_rate - log_gamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(k);
    }
}

}  // namespace

double log_standard_gamma_sample(double shape, RngStream& rng) {
    require_positive(shape, "Gamma shape");
    if (shape >= 1.0) return std::log(marsaglia_tsang(shape, rng));
    const double boosted = marsaglia_tsang(shape + 1.0, rng);
    return std::log(boosted) + std::log(rng.uniform_open()) / shape;
}

double gamma_sample(double shape, double scale, RngStream& rng) {
    require_positive(shape, "Gamma shape");
    require_positive(scale, "Gamma scale");
    if (shape >= 1.0) return scale * marsaglia_tsang(shape, rng);
    return scale * std::exp(log_standard_gamma_sample(shape, rng));
}

std::uint64_t poisson_sample(double rate, RngStream& rng) {
    if (!std::isfinite(rate) || rate < 0.0) throw DomainError("Poisson rate must be finite and non-negative");
    if (rate == 0.0) return 0;
    if (rate <= 30.0) return poisson_inversion(rate, rng);
    return poisson_ptrs(rate, rng);
}

std::uint64_t binomial_sample(std::uint64_t trials, double p, RngStream& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_sample: p must lie in [0, 1]");
    constexpr std::uint64_t kDirectLimit = 64;
    std::uint64_t offset = 0;
    std::uint64_t n = trials;
    while (n > kDirectLimit && p > 0.0 && p < 1.0) {
        // The a-th order statistic of n uniforms is Beta(a, n + 1 - a).
        const std::uint64_t a = n / 2 + 1;
        const std::uint64_t b = n + 1 - a;
        const double ga = marsaglia_tsang(static_cast<double>(a), rng);
        const double gb = marsaglia_tsang(static_cast<double>(b), rng);
        const double x = ga / (ga + gb);
        if (x >= p) {
            n = a - 1;
            p = p / x;
        } else {
            offset += a;
            n = b - 1;
            p = (p - x) / (1.0 - x);
        }
    }
    if (p <= 0.0) return offset;
    if (p >= 1.0) return offset + n;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) hits += rng.uniform() < p ? 1 : 0;
    return offset + hits;
}

Composition dirichlet_sample(const DirichletParams& params, RngStream& rng) {
    std::vector<double> logs(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) logs[i] = log_standard_gamma_sample(params[i], rng);
    const double norm = log_sum_exp(logs);
    std::vector<double> x(params.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(logs[i] - norm);
    return Composition::from_weights(std::move(x));
}

std::uint64_t negative_binomial_sample_via_mixture(double total_shape, double scale, RngStream& rng) {
    const double rate = gamma_sample(total_shape, scale, rng);
    return poisson_sample(rate, rng);
}

CountVector multinomial_sample(std::uint64_t m, const Composition& probs, RngStream& rng) {
    const std::size_t n = probs.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + probs[i];
    std::vector<std::uint64_t> counts(n, 0);
    std::uint64_t remaining = m;
    for (std::size_t i = 0; i + 1 < n && remaining > 0; ++i) {
        const double conditional = std::clamp(probs[i] / suffix[i], 0.0, 1.0);
        counts[i] = binomial_sample(remaining, conditional, rng);
        remaining -= counts[i];
    }
    counts[n - 1] += remaining;
    return CountVector(std::move(counts));
}

CountVector dirichlet_multinomial_sample(const GammaMixtureParams& params, std::uint64_t m,
                                         RngStream& rng) {
    const DirichletParams dirichlet(std::vector<double>(params.shapes().begin(), params.shapes().end()));
    return multinomial_sample(m, dirichlet_sample(dirichlet, rng), rng);
}

std::uint64_t beta_binomial_sample(const BetaBinomialParams& params, RngStream& rng) {
    const double la = log_standard_gamma_sample(params.a(), rng);
    const double lb = log_standard_gamma_sample(params.b(), rng);
    // u = ga / (ga + gb) evaluated as a logistic in the log difference.
    const double u = 1.0 / (1.0 + std::exp(lb - la));
    return binomial_sample(params.trials(), u, rng);
}

CountPair normalized_nb_sample(const GammaMixtureParams& params, std::size_t component,
                               RngStream& rng) {
    if (component >= params.size()) throw ContractViolation("normalized_nb_sample: component out of range");
    CountPair out{0, 0};
    const auto shapes = params.shapes();
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const double rate = gamma_sample(shapes[i], params.scale(), rng);
        const std::uint64_t x = poisson_sample(rate, rng);
        out.m += x;
        if (i == component) out.k = x;
    }
    return out;
}

}  // namespace compdist
