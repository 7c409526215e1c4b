#include "compdist/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "compdist/errors.hpp"

namespace compdist {
namespace {

constexpr int kZetaTerms = 42;

// ζ(k) − 1 for k = 2..kZetaTerms+1: direct sum to N − 1 plus an Euler–Maclaurin tail from N.
const std::array<double, kZetaTerms>& zeta_minus_one() {
    static const std::array<double, kZetaTerms> table = [] {
        std::array<double, kZetaTerms> out{};
        constexpr double kN = 64.0;
        for (int idx = 0; idx < kZetaTerms; ++idx) {
            const double k = idx + 2.0;
            double tail = std::pow(kN, 1.0 - k) / (k - 1.0) + 0.5 * std::pow(kN, -k) +
                          k * std::pow(kN, -k - 1.0) / 12.0 -
                          k * (k + 1) * (k + 2) * std::pow(kN, -k - 3.0) / 720.0 +
                          k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * std::pow(kN, -k - 5.0) / 30240.0;
            double sum = tail;
            for (int n = static_cast<int>(kN) - 1; n >= 2; --n) sum += std::pow(n, -k);
            out[idx] = sum;
        }
        return out;
    }();
    return table;
}

// log Γ(2 + x) for |x| <= 0.5.
double log_gamma_near_two(double x) {
    const auto& zeta = zeta_minus_one();
    double acc = 0.0;
    for (int idx = kZetaTerms - 1; idx >= 0; --idx) {
        const double k = idx + 2.0;
        const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
        acc = acc * x + sign * zeta[idx] / k;
    }
    // acc now holds Σ (−1)^k (ζ(k) − 1) x^(k−2) / k
    return x * ((1.0 - std::numbers::egamma) + x * acc);
}

double log_gamma_stirling(double a) {
    constexpr double kHalfLogTwoPi = 0.91893853320467274178;
    constexpr std::array<double, 8> kCoeffs = {
        1.0 / 12.0,  -1.0 / 360.0,     1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0,
    };
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    double series = 0.0;
    for (auto it = kCoeffs.rbegin(); it != kCoeffs.rend(); ++it) series = series * inv2 + *it;
    return (a - 0.5) * std::log(a) - a + kHalfLogTwoPi + series * inv;
}

}  // namespace

double log_gamma(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(a));
    }
    if (a >= 10.0) return log_gamma_stirling(a);
    if (a >= 2.5) {
        double shifted = a;
        double product = 1.0;
        while (shifted >= 2.5) {
            shifted -= 1.0;
            product *= shifted;
        }
        return std::log(product) + log_gamma_near_two(shifted - 2.0);
    }
    if (a >= 1.5) return log_gamma_near_two(a - 2.0);
    if (a >= 0.5) return log_gamma_near_two(a - 1.0) - std::log1p(a - 1.0);
    return log_gamma_near_two(a) - std::log(a) - std::log1p(a);
}

double log_multivariate_beta(std::span<const double> alpha) {
    if (alpha.size() < 2) throw ContractViolation("log_multivariate_beta: need at least two entries");
    double sum_log = 0.0;
    double total = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw DomainError("log_multivariate_beta: entries must be positive");
        sum_log += log_gamma(a);
        total += a;
    }
    return sum_log - log_gamma(total);
}

double log_beta(double a, double b) {
    const std::array<double, 2> ab{a, b};
    return log_multivariate_beta(ab);
}

double log_factorial(std::uint64_t m) { return log_gamma(static_cast<double>(m) + 1.0); }

double log_binomial_coefficient(std::uint64_t m, std::uint64_t k) {
    if (k > m) throw DomainError("log_binomial_coefficient: k exceeds m");
    if (k == 0 || k == m) return 0.0;
    return log_factorial(m) - log_factorial(k) - log_factorial(m - k);
}

double rank_one_update_det(std::span<const double> diag, std::span<const double> u,
                           std::span<const double> v) {
    if (diag.size() != u.size() || diag.size() != v.size()) {
        throw ContractViolation("rank_one_update_det: diag, u and v must have equal length");
    }
    double correction = 1.0;
    double det = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] == 0.0) throw ContractViolation("rank_one_update_det: zero diagonal entry");
        correction += v[i] * u[i] / diag[i];
        det *= diag[i];
    }
    return correction * det;
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) throw ContractViolation("log_sum_exp: empty input");
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v)) return v;
        hi = std::max(hi, v);
    }
    if (std::isinf(hi)) return hi;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - hi);
    return hi + std::log(sum);
}

}  // namespace compdist
