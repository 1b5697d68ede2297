#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace planeflow {

/// Raised by field/right-hand-side evaluators on their singular locus
/// (the y-axis for the outer-branch dynamics, theta = +-pi/2 in polar form).
class singularity_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an integration run aborts; carries the offending step index.
class integration_error : public std::runtime_error {
public:
    integration_error(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Raised by the expression parser; column() is 1-based.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t column)
        : std::runtime_error(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Raised when an expression is evaluated outside its domain
/// (log of a non-positive value, fractional power of a negative base).
class eval_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace planeflow
