#include "compdist/distributions.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "compdist/errors.hpp"
#include "compdist/numeric.hpp"

namespace compdist {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1)");
}

}  // namespace

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) throw ContractViolation("DirichletParams: need at least two components");
    for (double a : alpha_) require_positive(a, "Dirichlet concentration");
    total_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
    log_normalizer_ = log_multivariate_beta(alpha_);
}

GammaMixtureParams::GammaMixtureParams(std::vector<double> shapes, double scale)
    : shapes_(std::move(shapes)), scale_(scale) {
    if (shapes_.size() < 2) throw ContractViolation("GammaMixtureParams: need at least two components");
    for (double r : shapes_) require_positive(r, "Gamma shape");
    require_positive(scale_, "Gamma scale");
    total_shape_ = std::accumulate(shapes_.begin(), shapes_.end(), 0.0);
}

CountVector::CountVector(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw ContractViolation("CountVector: empty");
    total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

BetaBinomialParams::BetaBinomialParams(double a, double b, std::uint64_t trials)
    : a_(a), b_(b), trials_(trials) {
    require_positive(a_, "Beta-Binomial a");
    require_positive(b_, "Beta-Binomial b");
}

double dirichlet_log_pdf(const DirichletParams& params, const Composition& x) {
    if (x.size() != params.size()) throw ContractViolation("dirichlet_log_pdf: dimension mismatch");
    double acc = -params.log_normalizer();
    for (std::size_t i = 0; i < x.size(); ++i) acc += (params[i] - 1.0) * std::log(x[i]);
    return acc;
}

double inverted_dirichlet_log_pdf(const DirichletParams& params, const RatioVector& y) {
    if (y.size() + 1 != params.size()) {
        throw ContractViolation("inverted_dirichlet_log_pdf: expected n - 1 ratio coordinates");
    }
    double acc = -params.log_normalizer();
    for (std::size_t i = 0; i < y.size(); ++i) acc += (params[i] - 1.0) * std::log(y[i]);
    return acc - params.total() * y.log_z();
}

double alr_dirichlet_log_pdf(const DirichletParams& params, const LogRatioVector& y) {
    if (y.size() + 1 != params.size()) {
        throw ContractViolation("alr_dirichlet_log_pdf: expected n - 1 log-ratio coordinates");
    }
    double acc = -params.log_normalizer();
    for (std::size_t i = 0; i < y.size(); ++i) acc += params[i] * y[i];
    return acc - params.total() * y.log_k();
}

double gamma_log_pdf(double shape, double scale, double x) {
    require_positive(shape, "Gamma shape");
    require_positive(scale, "Gamma scale");
    if (std::isnan(x)) throw DomainError("gamma_log_pdf: NaN point");
    if (x < 0.0 || std::isinf(x)) return kNegInf;
    if (x == 0.0) {
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        if (shape > 1.0) return kNegInf;
        return -std::log(scale);
    }
    return (shape - 1.0) * std::log(x) - x / scale - log_gamma(shape) - shape * std::log(scale);
}

double poisson_log_pmf(double rate, std::uint64_t k) {
    require_positive(rate, "Poisson rate");
    return static_cast<double>(k) * std::log(rate) - rate - log_factorial(k);
}

double negative_binomial_log_pmf(double total_shape, double p, std::uint64_t m) {
    require_positive(total_shape, "NB shape R");
    require_probability(p);
    const double md = static_cast<double>(m);
    const double coeff = m == 0 ? 0.0 : log_gamma(md + total_shape) - log_gamma(total_shape) - log_factorial(m);
    return coeff + total_shape * std::log1p(-p) + md * std::log(p);
}

double multinomial_log_pmf(std::uint64_t m, const Composition& probs, const CountVector& x) {
    if (x.total() != m) throw ContractViolation("multinomial_log_pmf: counts do not sum to m");
    if (x.size() != probs.size()) throw ContractViolation("multinomial_log_pmf: dimension mismatch");
    double acc = log_factorial(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        acc += static_cast<double>(x[i]) * std::log(probs[i]) - log_factorial(x[i]);
    }
    return acc;
}

double dirichlet_multinomial_log_pmf(const GammaMixtureParams& params, std::uint64_t m,
                                     const CountVector& x) {
    if (x.total() != m) throw ContractViolation("dirichlet_multinomial_log_pmf: counts do not sum to m");
    if (x.size() != params.size()) throw ContractViolation("dirichlet_multinomial_log_pmf: dimension mismatch");
    if (m == 0) return 0.0;
    const auto r = params.shapes();
    const double total = params.total_shape();
    double acc = log_factorial(m) + log_gamma(total) - log_gamma(static_cast<double>(m) + total);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        acc += log_gamma(static_cast<double>(x[i]) + r[i]) - log_gamma(r[i]) - log_factorial(x[i]);
    }
    return acc;
}

double beta_binomial_log_pmf(const BetaBinomialParams& params, std::uint64_t k) {
    const std::uint64_t m = params.trials();
    if (k > m) throw DomainError("beta_binomial_log_pmf: k exceeds the number of trials");
    if (m == 0) return 0.0;
    const double kd = static_cast<double>(k);
    const double rest = static_cast<double>(m - k);
    return log_binomial_coefficient(m, k) + log_beta(kd + params.a(), rest + params.b()) -
           log_beta(params.a(), params.b());
}

double normalized_nb_log_pmf(const GammaMixtureParams& params, std::size_t component,
                             std::uint64_t k, std::uint64_t m) {
    if (component >= params.size()) throw ContractViolation("normalized_nb_log_pmf: component out of range");
    if (k > m) throw DomainError("normalized_nb_log_pmf: k exceeds m");
    const double r = params.shapes()[component];
    const double total = params.total_shape();
    const double nb = negative_binomial_log_pmf(total, params.success_probability(), m);
    return nb + beta_binomial_log_pmf(BetaBinomialParams(r, total - r, m), k);
}

double nb_tail_mass(double total_shape, double p, std::uint64_t bound) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::uint64_t m = 0; m <= bound; ++m) {
        const double term = std::exp(negative_binomial_log_pmf(total_shape, p, m)) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return 1.0 - sum;
}

std::uint64_t nb_truncation_bound(double total_shape, double p, double tail_tolerance) {
    require_positive(total_shape, "NB shape R");
    require_probability(p);
    if (!(tail_tolerance > 0.0)) throw DomainError("nb_truncation_bound: tolerance must be positive");
    const double mean = total_shape * p / (1.0 - p);
    double sum = 0.0;
    double carry = 0.0;
    for (std::uint64_t m = 0;; ++m) {
        const double term = std::exp(negative_binomial_log_pmf(total_shape, p, m)) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
        // Past the mean the pmf is decreasing, so a vanishing term means the tail is negligible too.
        if (1.0 - sum < tail_tolerance) return m;
        if (static_cast<double>(m) > mean && term == 0.0) return m;
    }
}

ValueMass normalized_nb_value_pmf(const GammaMixtureParams& params, std::size_t component,
                                  std::uint64_t k, std::uint64_t m,
                                  std::optional<std::uint64_t> bound) {
    if (m == 0) throw DomainError("normalized_nb_value_pmf: the ratio k/m needs m >= 1");
    if (k > m) throw DomainError("normalized_nb_value_pmf: k exceeds m");
    const std::uint64_t limit = bound.value_or(
        nb_truncation_bound(params.total_shape(), params.success_probability()));
    const std::uint64_t g = std::gcd(k, m);
    const std::uint64_t k0 = k / g;
    const std::uint64_t m0 = m / g;
    LogReal mass = LogReal::zero();
    for (std::uint64_t j = 1; j * m0 <= limit; ++j) {
        mass += LogReal(normalized_nb_log_pmf(params, component, j * k0, j * m0));
    }
    return {mass, limit};
}

}  // namespace compdist
