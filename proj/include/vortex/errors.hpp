#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vortex {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input violating an operation's stated precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidGridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Boundary parametrization is not a valid Jordan curve (R^2 <= 0, Phi' = 0).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A checked analytic hypothesis fails numerically.
class HypothesisViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Carries the last iterate so callers can report diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                     double last_residual)
        : std::runtime_error(what),
          last_iterate_(std::move(last_iterate)),
          last_residual_(last_residual) {}

    const std::vector<double>& last_iterate() const { return last_iterate_; }
    double last_residual() const { return last_residual_; }

private:
    std::vector<double> last_iterate_;
    double last_residual_;
};

}  // namespace vortex
