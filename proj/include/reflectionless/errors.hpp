#pragma once

#include <stdexcept>
#include <string>

namespace refl {

// Caller misuse: mismatched jets, bad indices, over-budget requests.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Spectral data or transform parameters that violate a stated condition.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical evaluation on otherwise valid input.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : NumericalError {
    using NumericalError::NumericalError;
};

struct RangeError : NumericalError {
    using NumericalError::NumericalError;
};

// A jet division or Wronskian/F-matrix determinant hit zero.
struct SingularityError : NumericalError {
    SingularityError(const std::string& what, double x)
        : NumericalError(what), location(x) {}
    double location;
};

struct SolverError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace refl
