#pragma once

#include <stdexcept>
#include <string>

namespace anosov {

// Precondition violations: malformed input, kind mismatch, out-of-range
// parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative method hit its cap; carries the worst residual seen.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double worst_residual)
        : std::runtime_error(what + " (worst residual " + std::to_string(worst_residual) + ")"),
          worst_residual_(worst_residual) {}

    double worst_residual() const noexcept { return worst_residual_; }

private:
    double worst_residual_;
};

// Symbol frequencies would wrap around the N-periodic lattice.
class AliasingError : public InputError {
public:
    using InputError::InputError;
};

// Enumeration or size cap exceeded (periodic points, word trees).
class CapError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace anosov
