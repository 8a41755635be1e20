#pragma once

#include <stdexcept>
#include <string>

namespace algae {

/// Bad inputs: malformed tables, invalid configuration, broken files.
/// CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures: ill-conditioned systems, non-convergence.
/// CLI maps these to exit code 2.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The data distribution has zero mass on a pair visited by the target
/// policy, so density ratios are unbounded.
class CoverageError : public ValidationError {
public:
    CoverageError(int state, int action)
        : ValidationError("coverage violation: data distribution is zero at visited pair (state=" +
                          std::to_string(state) + ", action=" + std::to_string(action) + ")"),
          state_(state), action_(action) {}

    int state() const { return state_; }
    int action() const { return action_; }

private:
    int state_;
    int action_;
};

/// The induced chain does not have a unique recurrent class, so no unique
/// stationary distribution exists.
class ErgodicityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A linear system was too ill-conditioned to meet the residual tolerance.
class ConditioningError : public SolverError {
public:
    using SolverError::SolverError;
};

/// An iterative solve stopped before reaching its tolerance.
class ConvergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

/// A solver was called with a configuration it does not support.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace algae
