#pragma once

#include <stdexcept>
#include <string>

namespace compdist {

/// Argument outside the mathematical domain of an operation (e.g. p not in (0,1), k > m).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Caller broke a structural precondition: length mismatch, empty input, totals that disagree.
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace compdist
