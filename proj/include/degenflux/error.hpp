#pragma once

#include <stdexcept>
#include <string>

namespace degenflux {

// Precondition or parameter-range violation. Maps to CLI exit code 2.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Iteration budget exhausted, overflow, or another numerical breakdown.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace degenflux
