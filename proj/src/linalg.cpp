#include "algae/linalg.hpp"

#include <string>

#include <Eigen/Dense>

#include "algae/errors.hpp"

namespace algae {

namespace {

double min_singular_value(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues().size() > 0 ? svd.singularValues().minCoeff() : 0.0;
}

[[noreturn]] void throw_conditioning(const Matrix& A, double residual, double tol) {
    throw ConditioningError("linear solve residual " + std::to_string(residual) +
                            " exceeds tolerance " + std::to_string(tol) +
                            " (min singular value " + std::to_string(min_singular_value(A)) + ")");
}

} // namespace

Vector solve_checked(const Matrix& A, const Vector& b, double tol) {
    Eigen::PartialPivLU<Matrix> lu(A);
    Vector x = lu.solve(b);
    // One refinement step tightens the residual on ill-conditioned systems.
    Vector r = b - A * x;
    x += lu.solve(r);
    const double residual = (b - A * x).lpNorm<Eigen::Infinity>();
    const double bound = tol * std::max(1.0, b.lpNorm<Eigen::Infinity>());
    if (!(residual <= bound) || !x.allFinite()) {
        Eigen::FullPivLU<Matrix> full(A);
        x = full.solve(b);
        const double retry = (b - A * x).lpNorm<Eigen::Infinity>();
        if (!(retry <= bound) || !x.allFinite()) throw_conditioning(A, retry, bound);
    }
    return x;
}

Vector solve_least_squares_checked(const Matrix& A, const Vector& b, double tol) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    Vector x = qr.solve(b);
    const double residual = (b - A * x).lpNorm<Eigen::Infinity>();
    const double bound = tol * std::max(1.0, b.lpNorm<Eigen::Infinity>());
    if (!(residual <= bound) || !x.allFinite()) throw_conditioning(A, residual, bound);
    return x;
}

} // namespace algae
