#pragma once

#include <stdexcept>
#include <string>

namespace chgrow {

/// Grid or field sizing precondition violated.
struct SizingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Two fields living on different grids were combined.
struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coefficient hypothesis check failed and was not overridden.
struct HypothesisError : ConfigError {
    using ConfigError::ConfigError;
};

/// Base class for failures during numerical work.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solution left the finite range; carries the offending step.
struct NonFiniteError : NumericalError {
    long step = -1;
    double time = 0.0;
    NonFiniteError(const std::string& msg, long step_, double time_)
        : NumericalError(msg), step(step_), time(time_) {}
};

/// Banded or tridiagonal system could not be factorized.
struct LinearSolveError : NumericalError {
    using NumericalError::NumericalError;
};

/// Iterative stage exceeded its iteration budget.
struct NoConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

/// Filesystem or serialization failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chgrow
