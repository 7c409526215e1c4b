#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "compdist/distributions.hpp"
#include "compdist/rng.hpp"

namespace compdist {

/// How a check's statistic is judged against its threshold.
enum class Comparison {
    kAbove,   ///< passes when statistic > threshold (p-values)
    kAtMost,  ///< passes when statistic <= threshold (errors, negative controls)
};

enum class VerifyLevel { kQuick, kFull };

struct CheckReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    Comparison comparison = Comparison::kAtMost;
    bool passed = false;
    /// Not enough data to decide; never counts as passed.
    bool inconclusive = false;
    /// Sample size, or the enumeration / truncation bound for exact checks.
    std::uint64_t size = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string detail;
};

/// One JSON object, no trailing newline. Key order is fixed.
std::string to_json_line(const CheckReport& report);

enum class TransformKind { kRatio, kLogRatio };

/// Significance level used by every statistical check.
inline constexpr double kSignificance = 1e-3;

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// All length-n non-negative integer vectors summing to m, in lexicographic order
/// (first coordinate descending). There are C(m + n − 1, n − 1) of them.
std::vector<CountVector> enumerate_compositions(std::size_t n, std::uint64_t m);

/// Determinant of a dense row-major dim × dim matrix by LU with partial pivoting.
double lu_determinant(std::vector<double> matrix, std::size_t dim);

/// Central-difference Jacobian of the inverse transform at y, restricted to the first
/// n − 1 output coordinates. Row-major (n − 1) × (n − 1).
std::vector<double> finite_difference_jacobian(TransformKind kind, std::span<const double> y,
                                               double step = 1e-6);

/// Relative error between two masses given as logs: |exp(a − b) − 1|.
double log_domain_rel_error(double log_a, double log_b);

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// Independent Poisson(λᵢ) vectors kept only when their total is exactly m, compared
/// by chi-square with Multinomial(m, λ / Σλ). `trials` is the number of accepted
/// vectors wanted; attempts stop at 10⁷. Fewer than 10 accepted per cell is inconclusive.
CheckReport check_conditional_multinomial(std::span<const double> lambda, std::uint64_t m,
                                          std::uint64_t trials, RngStream& rng);

/// Decile bins of π₁ = λ₁ / (λ₁ + λ₂) against S ∈ {0, 1, 2, ≥3}, chi-square independence.
/// With `negative_control`, S is replaced by ⌊4π₁⌋ and the check passes only if
/// independence is rejected.
CheckReport check_pi_independent_of_S(const GammaMixtureParams& params, std::uint64_t trials,
                                      RngStream& rng, bool negative_control = false);

/// Monte Carlo over π ~ Dirichlet(r) of the Multinomial pmf at every outcome, against the
/// closed-form DM pmf. Statistic is the worst |estimate − exact| in standard errors.
CheckReport check_dm_integral(const GammaMixtureParams& params, std::uint64_t m,
                              std::uint64_t trials, RngStream& rng);

/// Exact enumeration: merging all categories but one turns DM into Beta-Binomial.
/// Every component is checked in turn.
CheckReport check_beta_binomial_merge(std::span<const double> shapes, std::uint64_t m,
                                      double tolerance = 1e-10);

/// KS test (n = 2, α ≥ 1) of transformed Dirichlet draws against the CDF of the analytic
/// push-forward density, integrated by adaptive Simpson after mapping onto (0, 1).
CheckReport check_transform_density_ks(const DirichletParams& params, TransformKind kind,
                                       std::uint64_t trials, RngStream& rng);

/// Analytic push-forward log density vs Dirichlet log density at the pulled-back point
/// plus the closed-form log-Jacobian, at random (α, y).
CheckReport check_transform_density_pointwise(TransformKind kind, std::size_t n,
                                              std::uint64_t points, RngStream& rng,
                                              double tolerance = 1e-12);

/// Closed-form log |det J| vs the LU determinant of the central-difference Jacobian.
CheckReport check_jacobian_finite_difference(TransformKind kind, std::size_t n,
                                             std::uint64_t points, RngStream& rng,
                                             double tolerance = 1e-6);

/// Round trip composition → transform → composition, worst componentwise relative error
/// over n = 2..max_n.
CheckReport check_round_trips(TransformKind kind, std::size_t max_n, std::uint64_t draws,
                              RngStream& rng, double tolerance = 1e-12);

/// Poisson-Gamma mixture draws against the NB pmf.
CheckReport check_nb_mixture(double total_shape, double scale, std::uint64_t trials, RngStream& rng);

/// |Σ pmf − 1| over full enumeration for n = 2..max_n, m = 0..max_m, `draws` random shape
/// vectors per n.
CheckReport check_dm_normalization(std::size_t max_n, std::uint64_t max_m, std::uint64_t draws,
                                   RngStream& rng, double tolerance = 1e-10);
CheckReport check_multinomial_normalization(std::size_t max_n, std::uint64_t max_m,
                                            std::uint64_t draws, RngStream& rng,
                                            double tolerance = 1e-10);

/// check_beta_binomial_merge over random shapes for n = 2..max_n, m = 0..max_m.
CheckReport check_beta_binomial_merge_sweep(std::size_t max_n, std::uint64_t max_m,
                                            std::uint64_t draws, RngStream& rng,
                                            double tolerance = 1e-10);

/// Σ of the pair pmf over k <= m <= M, M the 1e-12 NB tail bound.
CheckReport check_normalized_nb_mass(const GammaMixtureParams& params, std::size_t component,
                                     double tolerance = 1e-9);

/// Value-aggregated masses over every reduced k/m with m <= bound, plus the m = 0 atom,
/// against 1 − NB-tail(bound).
CheckReport check_normalized_nb_value_mass(const GammaMixtureParams& params, std::size_t component,
                                           std::uint64_t bound, double tolerance = 1e-10);

CheckReport check_gamma_exponential_ks(double scale, std::uint64_t trials, RngStream& rng);
/// Gamma(r₁, θ) + Gamma(r₂, θ) against the Gamma(r₁ + r₂, θ) CDF.
CheckReport check_gamma_summation_ks(double shape1, double shape2, double scale,
                                     std::uint64_t trials, RngStream& rng);
/// Poisson(a) + Poisson(b) against direct Poisson(a + b) draws, two-sample chi-square.
CheckReport check_poisson_superposition(double a, double b, std::uint64_t trials, RngStream& rng);
CheckReport check_poisson_fit(double rate, std::uint64_t trials, RngStream& rng);
CheckReport check_multinomial_sampler(std::uint64_t m, const Composition& probs,
                                      std::uint64_t trials, RngStream& rng);

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::kQuick;
    /// Multiplies every exact-arithmetic tolerance. Anything but 1 is for tests.
    double tolerance_scale = 1.0;
    /// Worker threads; 0 means hardware concurrency. Output does not depend on it.
    unsigned threads = 0;
};

/// Every check above, each on its own substream of `seed`, reported in a fixed order.
/// Quick level caps trials at 10⁴ and m at 8. A failed statistical check is rerun once
/// with 10× the samples on a fresh substream and the rerun is what gets reported.
std::vector<CheckReport> run_all(std::uint64_t seed, const VerifyOptions& options = {});

}  // namespace compdist
