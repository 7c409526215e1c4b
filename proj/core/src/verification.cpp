#include "compdist/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "compdist/errors.hpp"
#include "compdist/format.hpp"
#include "compdist/numeric.hpp"
#include "compdist/quadrature.hpp"
#include "compdist/sampling.hpp"
#include "compdist/simplex.hpp"
#include "compdist/stat_tests.hpp"

namespace compdist {
namespace {

double uniform_between(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

double log_uniform(RngStream& rng, double lo, double hi) {
    return std::exp(uniform_between(rng, std::log(lo), std::log(hi)));
}

std::vector<double> random_shapes(RngStream& rng, std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (double& v : out) v = log_uniform(rng, lo, hi);
    return out;
}

std::vector<double> random_point(TransformKind kind, std::size_t coords, RngStream& rng) {
    std::vector<double> y(coords);
    for (double& v : y) v = kind == TransformKind::kRatio ? std::exp(uniform_between(rng, -3.0, 3.0))
                                                          : uniform_between(rng, -5.0, 5.0);
    return y;
}

const char* kind_name(TransformKind kind) { return kind == TransformKind::kRatio ? "ratio" : "alr"; }

CheckReport make_report(std::string name, double statistic, double threshold, Comparison comparison,
                        std::uint64_t size) {
    CheckReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.comparison = comparison;
    r.size = size;
    r.passed = comparison == Comparison::kAbove ? statistic > threshold : statistic <= threshold;
    return r;
}

CheckReport p_value_report(std::string name, double p_value, std::uint64_t size) {
    return make_report(std::move(name), p_value, kSignificance, Comparison::kAbove, size);
}

CheckReport error_report(std::string name, double error, double tolerance, std::uint64_t size) {
    // NaN never passes
    CheckReport r = make_report(std::move(name), error, tolerance, Comparison::kAtMost, size);
    if (std::isnan(error)) r.passed = false;
    return r;
}

std::vector<double> inverse_head(TransformKind kind, std::vector<double> y) {
    const Composition x = kind == TransformKind::kRatio ? ratio_inverse(RatioVector(std::move(y)))
                                                        : log_ratio_inverse(LogRatioVector(std::move(y)));
    return {x.entries().begin(), x.entries().end() - 1};
}

double closed_form_log_det(TransformKind kind, const std::vector<double>& y) {
    const std::size_t n = y.size() + 1;
    return kind == TransformKind::kRatio ? log_det_jacobian_ratio_inverse(RatioVector(y), n)
                                         : log_det_jacobian_log_ratio_inverse(LogRatioVector(y), n);
}

double expected_from_pmf(double log_pmf) { return std::exp(log_pmf); }

}  // namespace

std::string to_json_line(const CheckReport& report) {
    nlohmann::ordered_json j;
    j["check"] = report.name;
    j["passed"] = report.passed;
    j["inconclusive"] = report.inconclusive;
    j["statistic"] = report.statistic;
    j["comparison"] = report.comparison == Comparison::kAbove ? "above" : "at_most";
    j["threshold"] = report.threshold;
    j["size"] = report.size;
    j["seed"] = report.seed;
    j["stream"] = report.stream;
    j["detail"] = report.detail;
    return j.dump();
}

std::vector<CountVector> enumerate_compositions(std::size_t n, std::uint64_t m) {
    if (n == 0) throw ContractViolation("enumerate_compositions: n must be at least 1");
    std::vector<CountVector> out;
    std::vector<std::uint64_t> current(n, 0);
    std::function<void(std::size_t, std::uint64_t)> fill = [&](std::size_t pos, std::uint64_t left) {
        if (pos + 1 == n) {
            current[pos] = left;
            out.emplace_back(current);
            return;
        }
        for (std::uint64_t v = left + 1; v-- > 0;) {
            current[pos] = v;
            fill(pos + 1, left - v);
        }
    };
    fill(0, m);
    return out;
}

double lu_determinant(std::vector<double> a, std::size_t dim) {
    if (a.size() != dim * dim) throw ContractViolation("lu_determinant: matrix is not dim x dim");
    double det = 1.0;
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < dim; ++row) {
            if (std::abs(a[row * dim + col]) > std::abs(a[pivot * dim + col])) pivot = row;
        }
        if (a[pivot * dim + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t k = 0; k < dim; ++k) std::swap(a[pivot * dim + k], a[col * dim + k]);
            det = -det;
        }
        const double diag = a[col * dim + col];
        det *= diag;
        for (std::size_t row = col + 1; row < dim; ++row) {
            const double factor = a[row * dim + col] / diag;
            for (std::size_t k = col; k < dim; ++k) a[row * dim + k] -= factor * a[col * dim + k];
        }
    }
    return det;
}

std::vector<double> finite_difference_jacobian(TransformKind kind, std::span<const double> y, double step) {
    const std::size_t d = y.size();
    std::vector<double> jac(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> plus(y.begin(), y.end());
        std::vector<double> minus(y.begin(), y.end());
        plus[j] += step;
        minus[j] -= step;
        const auto xp = inverse_head(kind, std::move(plus));
        const auto xm = inverse_head(kind, std::move(minus));
        for (std::size_t i = 0; i < d; ++i) jac[i * d + j] = (xp[i] - xm[i]) / (2.0 * step);
    }
    return jac;
}

double log_domain_rel_error(double log_a, double log_b) {
    if (log_a == log_b) return 0.0;
    return std::abs(std::expm1(log_a - log_b));
}

CheckReport check_conditional_multinomial(std::span<const double> lambda, std::uint64_t m,
                                          std::uint64_t trials, RngStream& rng) {
    constexpr std::uint64_t kMaxAttempts = 10'000'000;
    const std::size_t n = lambda.size();
    const auto cells = enumerate_compositions(n, m);
    std::map<std::vector<std::uint64_t>, std::size_t> index;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        index.emplace(std::vector<std::uint64_t>(cells[i].counts().begin(), cells[i].counts().end()), i);
    }
    const Composition probs = Composition::from_weights({lambda.begin(), lambda.end()});

    std::vector<double> observed(cells.size(), 0.0);
    std::uint64_t accepted = 0;
    std::uint64_t attempts = 0;
    std::vector<std::uint64_t> draw(n);
    while (accepted < trials && attempts < kMaxAttempts) {
        ++attempts;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            draw[i] = poisson_sample(lambda[i], rng);
            total += draw[i];
        }
        if (total != m) continue;
        ++observed[index.at(draw)];
        ++accepted;
    }
    std::vector<double> expected(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        expected[i] = expected_from_pmf(multinomial_log_pmf(m, probs, cells[i]));
    }
    const std::string name = "conditional_multinomial[lambda=" + format_tuple(lambda) +
                             ",m=" + std::to_string(m) + "]";
    const auto chi = chi_square_goodness_of_fit(observed, expected);
    CheckReport r = p_value_report(name, chi.p_value, accepted);
    r.detail = "accepted " + std::to_string(accepted) + " of " + std::to_string(attempts) +
               " attempts; " + std::to_string(cells.size()) + " outcomes, " +
               std::to_string(chi.cells) + " chi-square cells";
    if (accepted < 10 * cells.size()) {
        r.inconclusive = true;
        r.passed = false;
        r.detail += "; too few accepted samples";
    }
    return r;
}

CheckReport check_pi_independent_of_S(const GammaMixtureParams& params, std::uint64_t trials,
                                      RngStream& rng, bool negative_control) {
    if (params.size() != 2) throw ContractViolation("check_pi_independent_of_S: needs exactly two components");
    const auto shapes = params.shapes();
    std::vector<double> pi(trials);
    std::vector<std::uint64_t> totals(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double l1 = log_standard_gamma_sample(shapes[0], rng);
        const double l2 = log_standard_gamma_sample(shapes[1], rng);
        pi[t] = 1.0 / (1.0 + std::exp(l2 - l1));
        const std::uint64_t x1 = poisson_sample(params.scale() * std::exp(l1), rng);
        const std::uint64_t x2 = poisson_sample(params.scale() * std::exp(l2), rng);
        totals[t] = negative_control ? static_cast<std::uint64_t>(std::floor(4.0 * pi[t])) : x1 + x2;
    }
    std::vector<double> sorted = pi;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (int d = 1; d < 10; ++d) cuts.push_back(sorted[trials * d / 10]);

    constexpr std::size_t kRows = 10;
    constexpr std::size_t kCols = 4;
    std::vector<double> table(kRows * kCols, 0.0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto row = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), pi[t]) - cuts.begin());
        const std::size_t col = std::min<std::uint64_t>(totals[t], kCols - 1);
        table[row * kCols + col] += 1.0;
    }
    const auto chi = chi_square_independence(table, kRows, kCols);
    const std::string name = std::string(negative_control ? "pi_independent_of_S_negative_control"
                                                          : "pi_independent_of_S") +
                             "[r=" + format_tuple(shapes) + ",theta=" + format_double(params.scale()) + "]";
    CheckReport r = negative_control
                        ? make_report(name, chi.p_value, kSignificance, Comparison::kAtMost, trials)
                        : p_value_report(name, chi.p_value, trials);
    r.detail = "chi-square " + format_double(chi.statistic) + " on " + format_double(chi.degrees_of_freedom) + " df";
    if (negative_control) r.detail += "; dependence must be detected";
    return r;
}

CheckReport check_dm_integral(const GammaMixtureParams& params, std::uint64_t m, std::uint64_t trials,
                              RngStream& rng) {
    if (params.size() > 4 || m > 10) throw ContractViolation("check_dm_integral: needs n <= 4 and m <= 10");
    const auto cells = enumerate_compositions(params.size(), m);
    const DirichletParams dirichlet({params.shapes().begin(), params.shapes().end()});
    std::vector<double> sum(cells.size(), 0.0);
    std::vector<double> sum_sq(cells.size(), 0.0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Composition pi = dirichlet_sample(dirichlet, rng);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = std::exp(multinomial_log_pmf(m, pi, cells[c]));
            sum[c] += v;
            sum_sq[c] += v * v;
        }
    }
    const double nt = static_cast<double>(trials);
    double worst = 0.0;
    double mc_total = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const double mean = sum[c] / nt;
        const double var = std::max(0.0, sum_sq[c] / nt - mean * mean) * nt / std::max(1.0, nt - 1.0);
        const double se = std::sqrt(var / nt);
        const double exact = std::exp(dirichlet_multinomial_log_pmf(params, m, cells[c]));
        const double diff = std::abs(mean - exact);
        double z = 0.0;
        if (se > 1e-15) {
            z = diff / se;
        } else if (diff > 1e-12) {
            z = std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, z);
        mc_total += mean;
    }
    CheckReport r = make_report("dm_integral[r=" + format_tuple(params.shapes()) + ",m=" + std::to_string(m) + "]",
                                worst, 4.0, Comparison::kAtMost, trials);
    r.detail = "worst cell in standard errors over " + std::to_string(cells.size()) +
               " outcomes; total MC mass " + format_double(mc_total);
    return r;
}

namespace {

double beta_binomial_merge_error(std::span<const double> shapes, std::uint64_t m, std::uint64_t* enumerated) {
    const GammaMixtureParams params({shapes.begin(), shapes.end()});
    const std::size_t n = shapes.size();
    const auto cells = enumerate_compositions(n, m);
    if (enumerated != nullptr) *enumerated += cells.size();
    // logs[c][k]: DM log masses of outcomes whose component c equals k
    std::vector<std::vector<std::vector<double>>> logs(n, std::vector<std::vector<double>>(m + 1));
    for (const auto& x : cells) {
        const double lp = dirichlet_multinomial_log_pmf(params, m, x);
        for (std::size_t c = 0; c < n; ++c) logs[c][x[c]].push_back(lp);
    }
    const double total = params.total_shape();
    double worst = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const BetaBinomialParams bb(shapes[c], total - shapes[c], m);
        for (std::uint64_t k = 0; k <= m; ++k) {
            const double merged = log_sum_exp(logs[c][k]);
            worst = std::max(worst, log_domain_rel_error(beta_binomial_log_pmf(bb, k), merged));
        }
    }
    return worst;
}

}  // namespace

CheckReport check_beta_binomial_merge(std::span<const double> shapes, std::uint64_t m, double tolerance) {
    if (shapes.size() > 5 || m > 12) throw ContractViolation("check_beta_binomial_merge: needs n <= 5 and m <= 12");
    std::uint64_t enumerated = 0;
    const double worst = beta_binomial_merge_error(shapes, m, &enumerated);
    CheckReport r = error_report("beta_binomial_merge[r=" + format_tuple(shapes) + ",m=" + std::to_string(m) + "]",
                                 worst, tolerance, enumerated);
    r.detail = "max relative error over every component and k";
    return r;
}

CheckReport check_beta_binomial_merge_sweep(std::size_t max_n, std::uint64_t max_m, std::uint64_t draws,
                                            RngStream& rng, double tolerance) {
    double worst = 0.0;
    std::uint64_t enumerated = 0;
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::uint64_t d = 0; d < draws; ++d) {
            const auto shapes = random_shapes(rng, n, 0.1, 10.0);
            for (std::uint64_t m = 0; m <= max_m; ++m) {
                worst = std::max(worst, beta_binomial_merge_error(shapes, m, &enumerated));
            }
        }
    }
    CheckReport r = error_report("beta_binomial_merge_sweep[n<=" + std::to_string(max_n) +
                                     ",m<=" + std::to_string(max_m) + "]",
                                 worst, tolerance, enumerated);
    r.detail = std::to_string(draws) + " random shape vectors per n, shapes log-uniform on [0.1, 10]";
    return r;
}

CheckReport check_transform_density_ks(const DirichletParams& params, TransformKind kind, std::uint64_t trials,
                                       RngStream& rng) {
    if (params.size() != 2) throw ContractViolation("check_transform_density_ks: needs n = 2");
    if (params[0] < 1.0 || params[1] < 1.0) {
        throw ContractViolation("check_transform_density_ks: quadrature CDF needs alpha >= 1");
    }
    // t in (0, 1) is y / (1 + y) for the ratio and the logistic of y for the log-ratio.
    std::vector<double> t(trials);
    for (auto& v : t) {
        const Composition x = dirichlet_sample(params, rng);
        if (kind == TransformKind::kRatio) {
            const double y = ratio_forward(x)[0];
            v = y / (1.0 + y);
        } else {
            const double y = log_ratio_forward(x)[0];
            v = 1.0 / (1.0 + std::exp(-y));
        }
    }
    std::sort(t.begin(), t.end());

    const auto density_in_t = [&](double u) {
        u = std::clamp(u, 1e-300, 1.0 - 0x1.0p-53);
        if (kind == TransformKind::kRatio) {
            const double y = u / (1.0 - u);
            return std::exp(inverted_dirichlet_log_pdf(params, RatioVector({y}))) / ((1.0 - u) * (1.0 - u));
        }
        const double y = std::log(u) - std::log1p(-u);
        return std::exp(alr_dirichlet_log_pdf(params, LogRatioVector({y}))) / (u * (1.0 - u));
    };
    constexpr double kTolerance = 1e-10;
    const double per_interval = kTolerance / static_cast<double>(trials + 1);
    std::vector<double> cdf(trials);
    double acc = 0.0;
    double prev = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        if (t[i] > prev) acc += adaptive_simpson(density_in_t, prev, t[i], per_interval);
        prev = t[i];
        cdf[i] = acc;
    }
    const double total = acc + adaptive_simpson(density_in_t, prev, 1.0, per_interval);
    const auto ks = ks_test(cdf);
    CheckReport r = p_value_report(std::string("transform_density_ks[") + kind_name(kind) +
                                       ",alpha=" + format_tuple(params.alpha()) + "]",
                                   ks.p_value, trials);
    r.detail = "D = " + format_double(ks.statistic) + "; quadrature total mass " + format_double(total);
    return r;
}

CheckReport check_transform_density_pointwise(TransformKind kind, std::size_t n, std::uint64_t points,
                                              RngStream& rng, double tolerance) {
    if (n < 2) throw ContractViolation("check_transform_density_pointwise: n must be at least 2");
    double worst = 0.0;
    for (std::uint64_t p = 0; p < points; ++p) {
        const DirichletParams params(random_shapes(rng, n, 0.2, 20.0));
        const auto y = random_point(kind, n - 1, rng);
        double analytic = 0.0;
        double pulled_back = 0.0;
        if (kind == TransformKind::kRatio) {
            const RatioVector ry(y);
            analytic = inverted_dirichlet_log_pdf(params, ry);
            pulled_back = dirichlet_log_pdf(params, ratio_inverse(ry)) + log_det_jacobian_ratio_inverse(ry, n);
        } else {
            const LogRatioVector ly(y);
            analytic = alr_dirichlet_log_pdf(params, ly);
            pulled_back = dirichlet_log_pdf(params, log_ratio_inverse(ly)) + log_det_jacobian_log_ratio_inverse(ly, n);
        }
        worst = std::max(worst, log_domain_rel_error(analytic, pulled_back));
    }
    CheckReport r = error_report(std::string("transform_density_pointwise[") + kind_name(kind) +
                                     ",n=" + std::to_string(n) + "]",
                                 worst, tolerance, points);
    r.detail = "max relative density error, random alpha log-uniform on [0.2, 20]";
    return r;
}

CheckReport check_jacobian_finite_difference(TransformKind kind, std::size_t n, std::uint64_t points,
                                             RngStream& rng, double tolerance) {
    if (n < 2) throw ContractViolation("check_jacobian_finite_difference: n must be at least 2");
    constexpr double kStep = 1e-6;
    double worst = 0.0;
    for (std::uint64_t p = 0; p < points; ++p) {
        const auto y = random_point(kind, n - 1, rng);
        const double fd = std::log(std::abs(lu_determinant(finite_difference_jacobian(kind, y, kStep), n - 1)));
        worst = std::max(worst, log_domain_rel_error(fd, closed_form_log_det(kind, y)));
    }
    CheckReport r = error_report(std::string("jacobian_finite_difference[") + kind_name(kind) +
                                     ",n=" + std::to_string(n) + "]",
                                 worst, tolerance, points);
    r.detail = "max relative determinant error, central differences with step 1e-6";
    return r;
}

CheckReport check_round_trips(TransformKind kind, std::size_t max_n, std::uint64_t draws, RngStream& rng,
                              double tolerance) {
    double worst = 0.0;
    std::uint64_t total = 0;
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::uint64_t d = 0; d < draws; ++d) {
            const DirichletParams params(random_shapes(rng, n, 0.3, 5.0));
            const Composition x = dirichlet_sample(params, rng);
            const Composition back = kind == TransformKind::kRatio ? ratio_inverse(ratio_forward(x))
                                                                   : log_ratio_inverse(log_ratio_forward(x));
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - x[i]) / x[i]);
            ++total;
        }
    }
    CheckReport r = error_report(std::string("round_trip[") + kind_name(kind) + ",n<=" + std::to_string(max_n) + "]",
                                 worst, tolerance, total);
    r.detail = "max componentwise relative error";
    return r;
}

CheckReport check_nb_mixture(double total_shape, double scale, std::uint64_t trials, RngStream& rng) {
    const double p = scale / (1.0 + scale);
    const std::uint64_t bound = nb_truncation_bound(total_shape, p);
    std::vector<double> observed(bound + 2, 0.0);
    double sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t x = negative_binomial_sample_via_mixture(total_shape, scale, rng);
        ++observed[std::min<std::uint64_t>(x, bound + 1)];
        sum += static_cast<double>(x);
    }
    std::vector<double> probs(bound + 2);
    double covered = 0.0;
    for (std::uint64_t m = 0; m <= bound; ++m) {
        probs[m] = std::exp(negative_binomial_log_pmf(total_shape, p, m));
        covered += probs[m];
    }
    probs[bound + 1] = std::max(0.0, 1.0 - covered);
    const auto chi = chi_square_goodness_of_fit(observed, probs);
    CheckReport r = p_value_report("nb_mixture[R=" + format_double(total_shape) + ",theta=" + format_double(scale) + "]",
                                   chi.p_value, trials);
    r.detail = "chi-square " + format_double(chi.statistic) + " on " + format_double(chi.degrees_of_freedom) +
               " df; sample mean " + format_double(sum / static_cast<double>(trials)) + " vs " +
               format_double(total_shape * scale);
    return r;
}

CheckReport check_dm_normalization(std::size_t max_n, std::uint64_t max_m, std::uint64_t draws, RngStream& rng,
                                   double tolerance) {
    double worst = 0.0;
    std::uint64_t enumerated = 0;
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::uint64_t d = 0; d < draws; ++d) {
            const GammaMixtureParams params(random_shapes(rng, n, 0.1, 10.0));
            for (std::uint64_t m = 0; m <= max_m; ++m) {
                const auto cells = enumerate_compositions(n, m);
                std::vector<double> logs;
                logs.reserve(cells.size());
                for (const auto& x : cells) logs.push_back(dirichlet_multinomial_log_pmf(params, m, x));
                worst = std::max(worst, std::abs(std::expm1(log_sum_exp(logs))));
                enumerated += cells.size();
            }
        }
    }
    CheckReport r = error_report("dm_normalization[n<=" + std::to_string(max_n) + ",m<=" + std::to_string(max_m) + "]",
                                 worst, tolerance, enumerated);
    r.detail = "max |total mass - 1| over " + std::to_string(draws) + " random shape vectors per n";
    return r;
}

CheckReport check_multinomial_normalization(std::size_t max_n, std::uint64_t max_m, std::uint64_t draws,
                                            RngStream& rng, double tolerance) {
    double worst = 0.0;
    std::uint64_t enumerated = 0;
    for (std::size_t n = 2; n <= max_n; ++n) {
        const DirichletParams flat(std::vector<double>(n, 1.0));
        for (std::uint64_t d = 0; d < draws; ++d) {
            const Composition probs = dirichlet_sample(flat, rng);
            for (std::uint64_t m = 0; m <= max_m; ++m) {
                const auto cells = enumerate_compositions(n, m);
                std::vector<double> logs;
                logs.reserve(cells.size());
                for (const auto& x : cells) logs.push_back(multinomial_log_pmf(m, probs, x));
                worst = std::max(worst, std::abs(std::expm1(log_sum_exp(logs))));
                enumerated += cells.size();
            }
        }
    }
    CheckReport r = error_report("multinomial_normalization[n<=" + std::to_string(max_n) +
                                     ",m<=" + std::to_string(max_m) + "]",
                                 worst, tolerance, enumerated);
    r.detail = "max |total mass - 1| over " + std::to_string(draws) + " uniform probability vectors per n";
    return r;
}

CheckReport check_normalized_nb_mass(const GammaMixtureParams& params, std::size_t component, double tolerance) {
    const double p = params.success_probability();
    const std::uint64_t bound = nb_truncation_bound(params.total_shape(), p);
    double sum = 0.0;
    double carry = 0.0;
    for (std::uint64_t m = 0; m <= bound; ++m) {
        for (std::uint64_t k = 0; k <= m; ++k) {
            const double term = std::exp(normalized_nb_log_pmf(params, component, k, m)) - carry;
            const double next = sum + term;
            carry = (next - sum) - term;
            sum = next;
        }
    }
    CheckReport r = error_report("normalized_nb_mass[r=" + format_tuple(params.shapes()) + ",theta=" +
                                     format_double(params.scale()) + ",component=" + std::to_string(component) + "]",
                                 std::abs(sum - 1.0), tolerance, bound);
    r.detail = "pairs k <= m <= " + std::to_string(bound) + " (NB tail below 1e-12); total " + format_double(sum);
    return r;
}

CheckReport check_normalized_nb_value_mass(const GammaMixtureParams& params, std::size_t component,
                                           std::uint64_t bound, double tolerance) {
    const double p = params.success_probability();
    LogReal total = LogReal(normalized_nb_log_pmf(params, component, 0, 0));
    std::uint64_t values = 0;
    for (std::uint64_t m = 1; m <= bound; ++m) {
        for (std::uint64_t k = 0; k <= m; ++k) {
            if (std::gcd(k, m) != 1) continue;
            total += normalized_nb_value_pmf(params, component, k, m, bound).mass;
            ++values;
        }
    }
    const double target = 1.0 - nb_tail_mass(params.total_shape(), p, bound);
    CheckReport r = error_report("normalized_nb_value_mass[r=" + format_tuple(params.shapes()) + ",theta=" +
                                     format_double(params.scale()) + ",M=" + std::to_string(bound) + "]",
                                 std::abs(total.linear() - target), tolerance, bound);
    r.detail = std::to_string(values) + " reduced values plus the m = 0 atom; target 1 - tail = " +
               format_double(target);
    return r;
}

CheckReport check_gamma_exponential_ks(double scale, std::uint64_t trials, RngStream& rng) {
    std::vector<double> x(trials);
    for (double& v : x) v = gamma_sample(1.0, scale, rng);
    std::sort(x.begin(), x.end());
    std::vector<double> cdf(trials);
    for (std::size_t i = 0; i < trials; ++i) cdf[i] = -std::expm1(-x[i] / scale);
    const auto ks = ks_test(cdf);
    CheckReport r = p_value_report("gamma_exponential_ks[theta=" + format_double(scale) + "]", ks.p_value, trials);
    r.detail = "D = " + format_double(ks.statistic);
    return r;
}

CheckReport check_gamma_summation_ks(double shape1, double shape2, double scale, std::uint64_t trials,
                                     RngStream& rng) {
    std::vector<double> x(trials);
    for (double& v : x) v = gamma_sample(shape1, scale, rng) + gamma_sample(shape2, scale, rng);
    std::sort(x.begin(), x.end());
    std::vector<double> cdf(trials);
    for (std::size_t i = 0; i < trials; ++i) cdf[i] = boost::math::gamma_p(shape1 + shape2, x[i] / scale);
    const auto ks = ks_test(cdf);
    CheckReport r = p_value_report("gamma_summation_ks[r=(" + format_double(shape1) + "," + format_double(shape2) +
                                       "),theta=" + format_double(scale) + "]",
                                   ks.p_value, trials);
    r.detail = "D = " + format_double(ks.statistic);
    return r;
}

CheckReport check_poisson_superposition(double a, double b, std::uint64_t trials, RngStream& rng) {
    std::vector<double> summed;
    std::vector<double> direct;
    const auto bump = [](std::vector<double>& h, std::uint64_t x) {
        if (h.size() <= x) h.resize(x + 1, 0.0);
        ++h[x];
    };
    for (std::uint64_t t = 0; t < trials; ++t) {
        bump(summed, poisson_sample(a, rng) + poisson_sample(b, rng));
        bump(direct, poisson_sample(a + b, rng));
    }
    const std::size_t width = std::max(summed.size(), direct.size());
    summed.resize(width, 0.0);
    direct.resize(width, 0.0);
    const auto chi = chi_square_homogeneity(summed, direct);
    CheckReport r = p_value_report("poisson_superposition[a=" + format_double(a) + ",b=" + format_double(b) + "]",
                                   chi.p_value, trials);
    r.detail = "two-sample chi-square " + format_double(chi.statistic) + " on " +
               format_double(chi.degrees_of_freedom) + " df";
    return r;
}

CheckReport check_poisson_fit(double rate, std::uint64_t trials, RngStream& rng) {
    const std::uint64_t bound = static_cast<std::uint64_t>(rate + 12.0 * std::sqrt(rate) + 20.0);
    std::vector<double> observed(bound + 2, 0.0);
    for (std::uint64_t t = 0; t < trials; ++t) ++observed[std::min(poisson_sample(rate, rng), bound + 1)];
    std::vector<double> probs(bound + 2);
    double covered = 0.0;
    for (std::uint64_t k = 0; k <= bound; ++k) {
        probs[k] = std::exp(poisson_log_pmf(rate, k));
        covered += probs[k];
    }
    probs[bound + 1] = std::max(0.0, 1.0 - covered);
    const auto chi = chi_square_goodness_of_fit(observed, probs);
    CheckReport r = p_value_report("poisson_fit[rate=" + format_double(rate) + "]", chi.p_value, trials);
    r.detail = std::string(rate <= 30.0 ? "inversion" : "transformed rejection") + " branch; chi-square " +
               format_double(chi.statistic);
    return r;
}

CheckReport check_multinomial_sampler(std::uint64_t m, const Composition& probs, std::uint64_t trials,
                                      RngStream& rng) {
    const auto cells = enumerate_compositions(probs.size(), m);
    std::map<std::vector<std::uint64_t>, std::size_t> index;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        index.emplace(std::vector<std::uint64_t>(cells[i].counts().begin(), cells[i].counts().end()), i);
    }
    std::vector<double> observed(cells.size(), 0.0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const CountVector x = multinomial_sample(m, probs, rng);
        ++observed[index.at(std::vector<std::uint64_t>(x.counts().begin(), x.counts().end()))];
    }
    std::vector<double> expected(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) expected[i] = std::exp(multinomial_log_pmf(m, probs, cells[i]));
    const auto chi = chi_square_goodness_of_fit(observed, expected);
    CheckReport r = p_value_report("multinomial_sampler[m=" + std::to_string(m) + ",probs=" +
                                       format_tuple(probs.entries()) + "]",
                                   chi.p_value, trials);
    r.detail = std::to_string(chi.cells) + " chi-square cells";
    return r;
}

namespace {

struct Task {
    std::function<CheckReport(std::uint64_t, RngStream&)> run;
    std::uint64_t trials = 0;
    bool statistical = false;
};

}  // namespace

std::vector<CheckReport> run_all(std::uint64_t seed, const VerifyOptions& options) {
    const bool quick = options.level == VerifyLevel::kQuick;
    const std::uint64_t trials = quick ? 10'000 : 100'000;
    const std::uint64_t max_m = quick ? 8 : 12;
    const double scale = options.tolerance_scale;

    std::vector<Task> tasks;
    const auto exact = [&](std::function<CheckReport(RngStream&)> fn) {
        tasks.push_back({[fn](std::uint64_t, RngStream& rng) { return fn(rng); }, 0, false});
    };
    const auto statistical = [&](std::function<CheckReport(std::uint64_t, RngStream&)> fn) {
        tasks.push_back({std::move(fn), trials, true});
    };

    for (const auto kind : {TransformKind::kRatio, TransformKind::kLogRatio}) {
        for (std::size_t n = 2; n <= 6; ++n) {
            exact([=](RngStream& rng) { return check_transform_density_pointwise(kind, n, 1000, rng, 1e-12 * scale); });
        }
    }
    for (const auto kind : {TransformKind::kRatio, TransformKind::kLogRatio}) {
        for (std::size_t n = 2; n <= 6; ++n) {
            exact([=](RngStream& rng) { return check_jacobian_finite_difference(kind, n, 100, rng, 1e-6 * scale); });
        }
    }
    for (const auto kind : {TransformKind::kRatio, TransformKind::kLogRatio}) {
        exact([=](RngStream& rng) { return check_round_trips(kind, 8, 1000, rng, 1e-12 * scale); });
    }
    const std::vector<std::pair<TransformKind, std::vector<double>>> ks_cases = {
        {TransformKind::kRatio, {1.0, 1.0}},
        {TransformKind::kRatio, {2.0, 3.0}},
        {TransformKind::kLogRatio, {2.0, 3.0}},
        {TransformKind::kLogRatio, {1.0, 1.0}},
    };
    for (const auto& [kind, alpha] : ks_cases) {
        statistical([=](std::uint64_t n, RngStream& rng) {
            return check_transform_density_ks(DirichletParams(alpha), kind, n, rng);
        });
    }
    exact([=](RngStream& rng) { return check_multinomial_normalization(4, max_m, 20, rng, 1e-10 * scale); });
    exact([=](RngStream& rng) { return check_dm_normalization(4, max_m, 20, rng, 1e-10 * scale); });

    const std::vector<std::pair<std::vector<double>, std::uint64_t>> merge_cases = {
        {{1.0, 1.0, 1.0}, 4}, {{2.0, 1.5, 1.5}, 7}, {{2.0, 3.0}, 7}};
    for (const auto& [r, m] : merge_cases) {
        exact([=](RngStream&) { return check_beta_binomial_merge(r, std::min(m, max_m), 1e-10 * scale); });
    }
    exact([=](RngStream& rng) { return check_beta_binomial_merge_sweep(5, max_m, 4, rng, 1e-10 * scale); });

    const std::vector<std::pair<double, double>> nb_cases = {{2.0, 1.0}, {0.5, 2.0}, {5.0, 0.3}, {1.5, 10.0}, {30.0, 1.2}};
    for (const auto& [shape, theta] : nb_cases) {
        statistical([=](std::uint64_t n, RngStream& rng) { return check_nb_mixture(shape, theta, n, rng); });
    }

    const std::vector<std::pair<std::vector<double>, std::uint64_t>> conditional_cases = {
        {{1.0, 1.0}, 2}, {{2.0, 1.0, 1.0}, 3}, {{0.5, 0.5}, 2}};
    for (const auto& [lambda, m] : conditional_cases) {
        statistical([=](std::uint64_t n, RngStream& rng) { return check_conditional_multinomial(lambda, m, n, rng); });
    }

    statistical([](std::uint64_t n, RngStream& rng) {
        return check_pi_independent_of_S(GammaMixtureParams({1.0, 1.0}, 1.0), n, rng);
    });
    statistical([](std::uint64_t n, RngStream& rng) {
        return check_pi_independent_of_S(GammaMixtureParams({3.0, 2.0}, 0.5), n, rng);
    });
    exact([=](RngStream& rng) {
        return check_pi_independent_of_S(GammaMixtureParams({1.0, 1.0}, 1.0), trials, rng, true);
    });

    statistical([](std::uint64_t n, RngStream& rng) {
        return check_dm_integral(GammaMixtureParams({1.0, 1.0, 1.0}), 2, n, rng);
    });
    statistical([](std::uint64_t n, RngStream& rng) {
        return check_dm_integral(GammaMixtureParams({2.0, 1.0}), 5, n, rng);
    });

    exact([=](RngStream&) { return check_normalized_nb_mass(GammaMixtureParams({1.0, 1.0}, 1.0), 0, 1e-9 * scale); });
    exact([=](RngStream&) {
        return check_normalized_nb_mass(GammaMixtureParams({2.5, 0.7, 1.3}, 3.0), 1, 1e-9 * scale);
    });
    exact([=](RngStream&) { return check_normalized_nb_mass(GammaMixtureParams({0.5, 4.0}, 0.25), 0, 1e-9 * scale); });
    exact([=](RngStream&) {
        return check_normalized_nb_value_mass(GammaMixtureParams({1.0, 1.0}, 1.0), 0, 50, 1e-10 * scale);
    });

    statistical([](std::uint64_t n, RngStream& rng) { return check_gamma_exponential_ks(2.0, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) { return check_gamma_summation_ks(0.7, 1.8, 1.5, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) { return check_poisson_superposition(3.5, 1.5, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) { return check_poisson_superposition(20.0, 15.0, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) { return check_poisson_fit(4.0, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) { return check_poisson_fit(45.0, n, rng); });
    statistical([](std::uint64_t n, RngStream& rng) {
        return check_multinomial_sampler(5, Composition({0.2, 0.3, 0.5}), n, rng);
    });

    std::vector<CheckReport> reports(tasks.size());
    const RngStream master(seed);
    const auto run_task = [&](std::size_t i) {
        const Task& task = tasks[i];
        CheckReport report;
        try {
            RngStream rng = master.substream(i);
            report = task.run(task.trials, rng);
            if (task.statistical && !report.passed && !report.inconclusive) {
                RngStream retry = master.substream(i).substream(1);
                const std::string first = format_double(report.statistic);
                report = task.run(task.trials * 10, retry);
                report.detail += "; rerun at 10x samples after statistic " + first;
            }
        } catch (const std::exception& e) {
            report.name = "task_" + std::to_string(i);
            report.passed = false;
            report.detail = std::string("exception: ") + e.what();
        }
        report.seed = seed;
        report.stream = i;
        reports[i] = std::move(report);
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
        });
    }
    for (auto& w : workers) w.join();
    return reports;
}

}  // namespace compdist
