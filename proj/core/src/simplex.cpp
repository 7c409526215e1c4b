#include "compdist/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compdist/errors.hpp"
#include "compdist/numeric.hpp"

namespace compdist {
namespace {

void check_chart_dimension(std::size_t coords, std::size_t n, const char* op) {
    if (n != coords + 1) {
        throw ContractViolation(std::string(op) + ": expected " + std::to_string(n - 1) +
                                " coordinates for n = " + std::to_string(n) + ", got " +
                                std::to_string(coords));
    }
}

}  // namespace

Composition::Composition(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.size() < 2) throw ContractViolation("Composition: need at least two parts");
    double sum = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double x = entries_[i];
        if (!std::isfinite(x) || x <= kBoundaryFloor) {
            throw ContractViolation("Composition: entry " + std::to_string(i + 1) +
                                    " is not strictly inside the simplex");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw ContractViolation("Composition: entries sum to " + std::to_string(sum) + ", not 1");
    }
    for (double& x : entries_) x /= sum;
}

Composition Composition::from_weights(std::vector<double> weights) {
    if (weights.size() < 2) throw ContractViolation("Composition: need at least two parts");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("Composition: weights must be finite and non-negative");
        sum += w;
    }
    for (double& w : weights) {
        w /= sum;
        if (!(w > 0.0)) throw DomainError("Composition: a part underflowed to zero");
    }
    return Composition(std::move(weights), Trusted{});
}

RatioVector::RatioVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ContractViolation("RatioVector: need at least one coordinate");
    double sum = 0.0;
    for (double y : entries_) {
        if (!std::isfinite(y) || !(y > 0.0)) throw ContractViolation("RatioVector: entries must be positive and finite");
        sum += y;
    }
    z_ = 1.0 + sum;
    log_z_ = std::log1p(sum);
}

LogRatioVector::LogRatioVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ContractViolation("LogRatioVector: need at least one coordinate");
    std::vector<double> with_reference;
    with_reference.reserve(entries_.size() + 1);
    with_reference.push_back(0.0);
    for (double y : entries_) {
        if (!std::isfinite(y)) throw ContractViolation("LogRatioVector: entries must be finite");
        with_reference.push_back(y);
    }
    log_k_ = log_sum_exp(with_reference);
}

double LogRatioVector::k() const { return std::exp(log_k_); }

RatioVector ratio_forward(const Composition& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) y[i] = x[i] / x[n - 1];
    return RatioVector(std::move(y));
}

Composition ratio_inverse(const RatioVector& y) {
    std::vector<double> x(y.size() + 1);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / y.z();
    x.back() = 1.0 / y.z();
    return Composition::from_weights(std::move(x));
}

LogRatioVector log_ratio_forward(const Composition& x) {
    const std::size_t n = x.size();
    const double log_last = std::log(x[n - 1]);
    std::vector<double> y(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) y[i] = std::log(x[i]) - log_last;
    return LogRatioVector(std::move(y));
}

Composition log_ratio_inverse(const LogRatioVector& y) {
    const auto entries = y.entries();
    const double shift = std::max(0.0, *std::max_element(entries.begin(), entries.end()));
    std::vector<double> x(entries.size() + 1);
    for (std::size_t i = 0; i < entries.size(); ++i) x[i] = std::exp(entries[i] - shift);
    x.back() = std::exp(-shift);
    return Composition::from_weights(std::move(x));
}

double log_det_jacobian_ratio_inverse(const RatioVector& y, std::size_t n) {
    check_chart_dimension(y.size(), n, "log_det_jacobian_ratio_inverse");
    return -static_cast<double>(n) * y.log_z();
}

double log_det_jacobian_log_ratio_inverse(const LogRatioVector& y, std::size_t n) {
    check_chart_dimension(y.size(), n, "log_det_jacobian_log_ratio_inverse");
    double sum = 0.0;
    for (double v : y.entries()) sum += v;
    return sum - static_cast<double>(n) * y.log_k();
}

}  // namespace compdist
