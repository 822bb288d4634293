#pragma once

#include <stdexcept>
#include <string>

namespace pw {

// Grid/shape mismatch between operands.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration (e.g. spectral derivative on a hard-wall grid,
// integrator stability bound violated).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario validation failure (bad key, out-of-range value).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Common base for runtime numerical failures (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical derivative failed its convergence gate.
struct ToleranceError : NumericalError {
    using NumericalError::NumericalError;
};

// Singular constraint matrix or vanishing current normalization.
struct DegeneracyError : NumericalError {
    using NumericalError::NumericalError;
};

// Trajectory entered a nodal region under the halt policy.
struct NodeError : NumericalError {
    NodeError(const std::string& msg, double when) : NumericalError(msg), time(when) {}
    double time;
};

// Wave function handed to a routine that requires unit norm.
struct NormalizationError : NumericalError {
    using NumericalError::NumericalError;
};

// Reality pairing q*_k = q_{-k} broken.
struct RealityError : NumericalError {
    using NumericalError::NumericalError;
};

// Statistical test invalidated (too many node-halted trajectories).
struct InvalidTestError : NumericalError {
    using NumericalError::NumericalError;
};

struct SolverError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace pw
