#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace compdist {

/// Log of a non-negative mass. Negative infinity is the only representation of zero.
class LogReal {
public:
    constexpr LogReal() = default;
    constexpr explicit LogReal(double log_value) : value_(log_value) {}

    static constexpr LogReal zero() { return LogReal(-std::numeric_limits<double>::infinity()); }
    static constexpr LogReal one() { return LogReal(0.0); }
    static LogReal from_linear(double x) { return LogReal(std::log(x)); }

    constexpr double log() const { return value_; }
    double linear() const { return std::exp(value_); }
    constexpr bool is_zero() const { return value_ == -std::numeric_limits<double>::infinity(); }

    friend constexpr LogReal operator*(LogReal a, LogReal b) { return LogReal(a.value_ + b.value_); }
    friend constexpr LogReal operator/(LogReal a, LogReal b) { return LogReal(a.value_ - b.value_); }
    friend LogReal operator+(LogReal a, LogReal b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const double hi = std::max(a.value_, b.value_);
        const double lo = std::min(a.value_, b.value_);
        return LogReal(hi + std::log1p(std::exp(lo - hi)));
    }
    LogReal& operator+=(LogReal other) { return *this = *this + other; }
    LogReal& operator*=(LogReal other) { return *this = *this * other; }

    friend constexpr auto operator<=>(LogReal, LogReal) = default;

private:
    double value_ = -std::numeric_limits<double>::infinity();
};

}  // namespace compdist
