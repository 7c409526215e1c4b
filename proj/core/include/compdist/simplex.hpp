#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace compdist {

/// A point on the open simplex: n >= 2 positive entries summing to one.
class Composition {
public:
    /// Smallest entry accepted from callers; the transforms are singular at the boundary.
    static constexpr double kBoundaryFloor = 1e-300;
    /// Largest |Σ xᵢ − 1| accepted before renormalizing.
    static constexpr double kSumTolerance = 1e-9;

    /// Validates and renormalizes. Entries <= kBoundaryFloor, a sum off by more
    /// than kSumTolerance, or n < 2 throw ContractViolation.
    explicit Composition(std::vector<double> entries);

    /// Normalizes positive weights (Gamma draws, exponentiated log-ratios).
    /// Only requires every entry to be positive and finite, both before and after
    /// division by the sum; throws DomainError when a weight underflowed to zero.
    static Composition from_weights(std::vector<double> weights);

    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    std::span<const double> entries() const { return entries_; }

private:
    struct Trusted {};
    Composition(std::vector<double> entries, Trusted) : entries_(std::move(entries)) {}

    std::vector<double> entries_;
};

/// yᵢ = xᵢ / xₙ for i < n, together with z = 1 + Σ yᵢ.
class RatioVector {
public:
    /// Entries must be positive and finite (ContractViolation otherwise).
    explicit RatioVector(std::vector<double> entries);

    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    std::span<const double> entries() const { return entries_; }
    double z() const { return z_; }
    /// log z computed as log1p(Σ yᵢ).
    double log_z() const { return log_z_; }

private:
    std::vector<double> entries_;
    double z_;
    double log_z_;
};

/// yᵢ = log(xᵢ / xₙ) for i < n, together with k = 1 + Σ exp(yᵢ).
///
/// k itself overflows once some yᵢ passes ~709, so log k is what gets cached.
class LogRatioVector {
public:
    /// Entries must be finite (ContractViolation otherwise).
    explicit LogRatioVector(std::vector<double> entries);

    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    std::span<const double> entries() const { return entries_; }
    double log_k() const { return log_k_; }
    double k() const;

private:
    std::vector<double> entries_;
    double log_k_;
};

RatioVector ratio_forward(const Composition& x);
Composition ratio_inverse(const RatioVector& y);

LogRatioVector log_ratio_forward(const Composition& x);
/// Softmax against an implicit zero reference, shifted by max(0, max yᵢ) before exponentiating.
Composition log_ratio_inverse(const LogRatioVector& y);

/// log |det J| of the inverse ratio map in the chart that drops xₙ: −n · log z.
/// `n` is the composition length and must equal y.size() + 1.
double log_det_jacobian_ratio_inverse(const RatioVector& y, std::size_t n);

/// log |det J| of the inverse log-ratio map in the same chart: Σ yᵢ − n · log k.
double log_det_jacobian_log_ratio_inverse(const LogRatioVector& y, std::size_t n);

}  // namespace compdist
