#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mqrank {

/// Raised when inputs are well-formed but violate a domain precondition
/// (out-of-range query index, no equilibrium in the requested regime, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a requested computation exceeds a configured size budget.
class CapacityError : public DomainError {
public:
    CapacityError(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : DomainError(what), required_(required), budget_(budget) {}

    std::uint64_t required() const { return required_; }
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

/// Malformed input files or values (bad JSON, schema violations, duplicates).
class InputError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace mqrank
