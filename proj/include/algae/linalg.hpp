#pragma once

#include <Eigen/Core>

#include "algae/mdp.hpp"

namespace algae {

/// Residual bound asserted after every direct solve.
inline constexpr double kSolveResidualTolerance = 1e-8;

/// Solves A x = b by pivoted LU with one step of iterative refinement,
/// then enforces ||A x - b||_inf <= tol * max(1, ||b||_inf). Throws
/// ConditioningError (reporting the smallest singular value) when the
/// residual check fails.
Vector solve_checked(const Matrix& A, const Vector& b,
                     double tol = kSolveResidualTolerance);

/// Least-squares solve of a consistent stacked system via column-pivoted QR
/// with the same residual check as solve_checked.
Vector solve_least_squares_checked(const Matrix& A, const Vector& b,
                                   double tol = kSolveResidualTolerance);

} // namespace algae
