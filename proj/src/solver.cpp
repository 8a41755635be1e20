#include "algae/solver.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "algae/errors.hpp"
#include "algae/linalg.hpp"
#include "algae/mdp_core.hpp"

namespace algae {

namespace {

void require_alpha_nonzero(double alpha) {
    if (alpha == 0.0) {
        throw ConfigError("alpha = 0 has no primal form; evaluate the bilinear Lagrangian "
                          "(lagrangian_objective / ope_estimate) instead");
    }
}

void require_discounted_mode(const TabularMdp& mdp, const AlgaeConfig& cfg, const char* op) {
    if (cfg.gamma_one_mode || mdp.discount() >= 1.0) {
        throw ConfigError(std::string(op) + " handles discount < 1 only; use undiscounted_solve");
    }
}

/// Bellman residual vector e = r + (gamma P_pi - I) nu, flat over pairs.
Vector bellman_residual(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Vector& nu) {
    ValueTable table(mdp.num_states(), mdp.num_actions(), nu);
    return bellman(mdp, pi, table).flat() - nu;
}

Matrix zeta_from_residual(const TabularMdp& mdp, const AlgaeConfig& cfg, const Vector& residual) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    Matrix zeta(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            zeta(s, a) = cfg.divergence.f_star_prime(residual[pair_index(s, a, A)] / cfg.alpha);
    return zeta;
}

void check_reachable_coverage(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                              const Occupancy& d_D) {
    const std::vector<bool> reachable = reachable_pairs(mdp, pi);
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            if (reachable[pair_index(s, a, mdp.num_actions())] && d_D(s, a) <= 0.0) {
                throw CoverageError(s, a);
            }
        }
    }
}

double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(symmetric, Eigen::EigenvaluesOnly);
    return eigen.eigenvalues().minCoeff();
}

/// Gradient descent with backtracking line search on a smooth convex
/// objective. Returns the final point; throws ConvergenceError when the
/// gradient norm target is not reached.
template <typename Objective, typename Gradient>
Vector descend(Vector x, const Objective& objective, const Gradient& gradient, double tol,
               int max_iters, const char* what) {
    double fx = objective(x);
    double step = 1.0;
    for (int it = 0; it < max_iters; ++it) {
        const Vector g = gradient(x);
        const double gnorm = g.template lpNorm<Eigen::Infinity>();
        if (gnorm <= tol) return x;
        const double g2 = g.squaredNorm();
        step = std::min(step * 2.0, 1e8);
        bool moved = false;
        for (int half = 0; half < 200; ++half) {
            Vector candidate = x - step * g;
            const double fc = objective(candidate);
            if (fc <= fx - 1e-4 * step * g2) {
                x = std::move(candidate);
                fx = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // Line search stalled at machine precision; accept if the
            // gradient is already near the target, otherwise report.
            if (gnorm <= 100.0 * tol) return x;
            throw ConvergenceError(std::string(what) + " stalled with gradient norm " +
                                   std::to_string(gnorm));
        }
    }
    const double gnorm = gradient(x).template lpNorm<Eigen::Infinity>();
    if (gnorm <= tol) return x;
    throw ConvergenceError(std::string(what) + " did not converge: gradient norm " +
                           std::to_string(gnorm) + " after " + std::to_string(max_iters) +
                           " iterations");
}

} // namespace

Matrix density_ratio(const Occupancy& d_pi, const Occupancy& d_D) {
    if (d_pi.num_states() != d_D.num_states() || d_pi.num_actions() != d_D.num_actions()) {
        throw ValidationError("occupancy shapes do not match");
    }
    Matrix w(d_pi.num_states(), d_pi.num_actions());
    for (int s = 0; s < d_pi.num_states(); ++s) {
        for (int a = 0; a < d_pi.num_actions(); ++a) {
            if (d_D(s, a) > 0.0) {
                w(s, a) = d_pi(s, a) / d_D(s, a);
            } else if (d_pi(s, a) > 0.0) {
                throw CoverageError(s, a);
            } else {
                w(s, a) = 0.0;
            }
        }
    }
    return w;
}

std::vector<bool> reachable_pairs(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    std::vector<bool> reachable(S * A, false);
    std::deque<int> queue;
    for (int s = 0; s < S; ++s) {
        if (mdp.initial_dist()[s] <= 0.0) continue;
        for (int a = 0; a < A; ++a) {
            if (pi.prob(s, a) > 0.0) {
                reachable[pair_index(s, a, A)] = true;
                queue.push_back(pair_index(s, a, A));
            }
        }
    }
    while (!queue.empty()) {
        const int idx = queue.front();
        queue.pop_front();
        for (int s_next = 0; s_next < S; ++s_next) {
            if (mdp.transition_matrix()(idx, s_next) <= 0.0) continue;
            for (int a_next = 0; a_next < A; ++a_next) {
                const int next = pair_index(s_next, a_next, A);
                if (!reachable[next] && pi.prob(s_next, a_next) > 0.0) {
                    reachable[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    return reachable;
}

double primal_objective(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                        const ValueTable& nu, const AlgaeConfig& cfg) {
    require_alpha_nonzero(cfg.alpha);
    require_discounted_mode(mdp, cfg, "primal_objective");
    const Vector e = bellman_residual(mdp, pi, nu.flat());
    const Vector b = initial_pair_distribution(mdp, pi);
    double penalty = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        penalty += d_D.flat()[i] * cfg.divergence.f_star(e[i] / cfg.alpha);
    }
    return (1.0 - mdp.discount()) * b.dot(nu.flat()) + cfg.alpha * penalty;
}

double lagrangian_objective(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                            const Occupancy& d_D, const ValueTable& nu, const Matrix& zeta,
                            const AlgaeConfig& cfg) {
    require_discounted_mode(mdp, cfg, "lagrangian_objective");
    const Vector e = bellman_residual(mdp, pi, nu.flat());
    const Vector b = initial_pair_distribution(mdp, pi);
    const int A = mdp.num_actions();
    double coupling = 0.0;
    double regularizer = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < A; ++a) {
            const double w = d_D(s, a);
            coupling += w * zeta(s, a) * e[pair_index(s, a, A)];
            regularizer += w * cfg.divergence.f(zeta(s, a));
        }
    }
    return (1.0 - mdp.discount()) * b.dot(nu.flat()) + coupling - cfg.alpha * regularizer;
}

AlgaeSolution solve_nu_quadratic(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const Occupancy& d_D, double alpha) {
    if (!(alpha > 0.0)) {
        throw ConfigError("solve_nu_quadratic requires alpha > 0");
    }
    AlgaeConfig cfg;
    cfg.alpha = alpha;
    require_discounted_mode(mdp, cfg, "solve_nu_quadratic");
    check_reachable_coverage(mdp, pi, d_D);

    const int n = mdp.num_pairs();
    const Matrix A = mdp.discount() * policy_transition_matrix(mdp, pi) - Matrix::Identity(n, n);
    const Vector b = initial_pair_distribution(mdp, pi);
    const Matrix weighted = d_D.flat().asDiagonal() * A;  // D A
    const Matrix normal = A.transpose() * weighted;       // A^T D A
    const Vector rhs =
        -(alpha * (1.0 - mdp.discount()) * b + A.transpose() * (d_D.flat().cwiseProduct(mdp.reward_flat())));

    Vector nu;
    try {
        nu = solve_checked(normal, rhs);
    } catch (const ConditioningError&) {
        // Zero data weight off the reachable set leaves null directions that
        // do not affect the objective; fall back to a least-squares solve and
        // only fail if the system is genuinely inconsistent.
        try {
            nu = solve_least_squares_checked(normal, rhs);
        } catch (const ConditioningError&) {
            throw ConditioningError(
                "normal matrix of the quadratic inner solve is singular (min eigenvalue " +
                std::to_string(min_eigenvalue(normal)) + ")");
        }
    }

    AlgaeSolution solution{ValueTable(mdp.num_states(), mdp.num_actions(), nu), Matrix(), 0.0,
                           0.0};
    solution.zeta = zeta_from_residual(mdp, cfg, bellman_residual(mdp, pi, nu));
    solution.objective = primal_objective(mdp, pi, d_D, solution.nu, cfg);
    return solution;
}

AlgaeSolution solve_nu_general(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                               const Occupancy& d_D, const AlgaeConfig& cfg) {
    require_alpha_nonzero(cfg.alpha);
    require_discounted_mode(mdp, cfg, "solve_nu_general");
    check_reachable_coverage(mdp, pi, d_D);

    const int n = mdp.num_pairs();
    const Matrix A = mdp.discount() * policy_transition_matrix(mdp, pi) - Matrix::Identity(n, n);
    const Vector b = initial_pair_distribution(mdp, pi);
    const Vector& r = mdp.reward_flat();
    const Vector& weights = d_D.flat();
    const double gamma = mdp.discount();
    // The inner problem is convex in nu for alpha > 0 (f* composed with an
    // affine map) and concave for alpha < 0; one descent path serves both.
    const double sign = cfg.alpha > 0.0 ? 1.0 : -1.0;

    const auto objective = [&](const Vector& nu) {
        double penalty = 0.0;
        const Vector e = r + A * nu;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            penalty += weights[i] * cfg.divergence.f_star(e[i] / cfg.alpha);
        }
        return sign * ((1.0 - gamma) * b.dot(nu) + cfg.alpha * penalty);
    };
    const auto gradient = [&](const Vector& nu) -> Vector {
        const Vector e = r + A * nu;
        Vector scaled(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            scaled[i] = weights[i] * cfg.divergence.f_star_prime(e[i] / cfg.alpha);
        }
        return sign * ((1.0 - gamma) * b + A.transpose() * scaled);
    };

    // Warm start at the stationary point of the quadratic surrogate; exact
    // already when f is quadratic.
    Vector nu0 = Vector::Zero(n);
    {
        const Matrix normal = A.transpose() * (weights.asDiagonal() * A);
        const Vector rhs = -(cfg.alpha * (1.0 - gamma) * b + A.transpose() * weights.cwiseProduct(r));
        try {
            nu0 = solve_checked(normal, rhs);
        } catch (const ConditioningError&) {
            nu0.setZero();
        }
    }

    Vector nu = descend(std::move(nu0), objective, gradient, cfg.inner_tolerance,
                        cfg.inner_max_iters, "inner nu solve");

    AlgaeSolution solution{ValueTable(mdp.num_states(), mdp.num_actions(), nu), Matrix(), 0.0,
                           0.0};
    solution.zeta = zeta_from_residual(mdp, cfg, bellman_residual(mdp, pi, nu));
    solution.objective = primal_objective(mdp, pi, d_D, solution.nu, cfg);
    return solution;
}

AlgaeSolution solve_nu(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                       const AlgaeConfig& cfg) {
    if (cfg.divergence.name() == "quadratic" && cfg.alpha > 0.0) {
        return solve_nu_quadratic(mdp, pi, d_D, cfg.alpha);
    }
    return solve_nu_general(mdp, pi, d_D, cfg);
}

Matrix policy_gradient_at(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                          const AlgaeConfig& cfg, const AlgaeSolution& solution) {
    require_discounted_mode(mdp, cfg, "policy_gradient");
    const int S = mdp.num_states();
    const int A = mdp.num_actions();

    // d/dtheta [(1-gamma) E_{mu0 pi}[nu*]] uses weight (1-gamma) mu0;
    // d/dtheta [E_{d_D}[f*(residual/alpha)]] differentiates pi only inside
    // B_pi nu*, giving weight gamma T^T (d_D . zeta) on next states.
    Vector flow(S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            flow[pair_index(s, a, A)] = d_D(s, a) * solution.zeta(s, a);
    const Vector state_weight = (1.0 - mdp.discount()) * mdp.initial_dist() +
                                mdp.discount() * mdp.transition_matrix().transpose() * flow;
    return score_gradient(pi, state_weight, solution.nu);
}

Matrix policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                       const AlgaeConfig& cfg) {
    const AlgaeSolution solution = solve_nu(mdp, pi, d_D, cfg);
    return policy_gradient_at(mdp, pi, d_D, cfg, solution);
}

TrainResult train(const TabularMdp& mdp, const OccupancyProvider& data, const AlgaeConfig& cfg,
                  int steps, double learning_rate) {
    if (steps < 0) throw ValidationError("steps must be nonnegative");
    SoftmaxPolicy pi = SoftmaxPolicy::uniform(mdp.num_states(), mdp.num_actions());
    TrainResult result{pi, {}};
    result.metrics.reserve(steps + 1);

    for (int step = 0; step <= steps; ++step) {
        const Occupancy d_D = data(pi, step);
        const AlgaeSolution solution = solve_nu(mdp, pi, d_D, cfg);
        const Matrix grad = policy_gradient_at(mdp, pi, d_D, cfg, solution);

        StepMetrics row;
        row.step = step;
        row.dual_return = dual_return(mdp, pi);
        row.objective = solution.objective;
        row.grad_norm = grad.lpNorm<Eigen::Infinity>();
        row.zeta_error = std::numeric_limits<double>::quiet_NaN();
        try {
            const Matrix w = density_ratio(visitation(mdp, pi), d_D);
            row.zeta_error = (solution.zeta - w).lpNorm<Eigen::Infinity>();
        } catch (const CoverageError&) {
            // exact ratio unavailable; leave NaN
        }
        result.metrics.push_back(row);

        if (step < steps) {
            pi = SoftmaxPolicy(pi.logits() + learning_rate * grad);
        }
    }
    result.policy = pi;
    return result;
}

TrainResult train(const TabularMdp& mdp, const Occupancy& d_D, const AlgaeConfig& cfg,
                  int steps, double learning_rate) {
    return train(
        mdp, [&d_D](const SoftmaxPolicy&, int) { return d_D; }, cfg, steps, learning_rate);
}

TrainResult train(const TabularMdp& mdp, const ExperienceSet& data, double smoothing,
                  const AlgaeConfig& cfg, int steps, double learning_rate) {
    const Occupancy d_D =
        empirical_distribution(data, mdp.num_states(), mdp.num_actions(), smoothing);
    return train(mdp, d_D, cfg, steps, learning_rate);
}

AlgaeSolution undiscounted_solve(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const Occupancy& d_D, const AlgaeConfig& cfg) {
    if (!cfg.gamma_one_mode) {
        throw ConfigError("undiscounted_solve requires gamma_one_mode");
    }
    if (!(cfg.alpha > 0.0)) {
        throw ConfigError("undiscounted_solve requires alpha > 0");
    }
    if (!has_unique_recurrent_class(mdp, pi)) {
        throw ErgodicityError("undiscounted solve requires a unichain policy");
    }
    // Coverage on the recurrent support.
    {
        const Occupancy stat = stationary_distribution(mdp, pi);
        for (int s = 0; s < mdp.num_states(); ++s) {
            for (int a = 0; a < mdp.num_actions(); ++a) {
                if (stat(s, a) > 0.0 && d_D(s, a) <= 0.0) throw CoverageError(s, a);
            }
        }
    }

    const int n = mdp.num_pairs();
    const Matrix M = policy_transition_matrix(mdp, pi) - Matrix::Identity(n, n);
    const Vector& r = mdp.reward_flat();
    const Vector& weights = d_D.flat();

    Vector nu(n);
    double lambda = 0.0;

    if (cfg.divergence.name() == "quadratic") {
        // Stationarity in nu and lambda plus the gauge row, solved jointly:
        //   M^T D (r + M nu - lambda 1) = 0
        //   d_D . (r + M nu - lambda 1)  = alpha
        //   d_D . nu                     = 0
        Matrix system(n + 2, n + 1);
        Vector rhs(n + 2);
        const Matrix weighted = weights.asDiagonal() * M;
        system.topLeftCorner(n, n) = M.transpose() * weighted;
        system.topRightCorner(n, 1) = -M.transpose() * weights;
        rhs.head(n) = -M.transpose() * weights.cwiseProduct(r);
        system.row(n).head(n) = (weights.transpose() * M);
        system(n, n) = -weights.sum();
        rhs[n] = cfg.alpha - weights.dot(r);
        system.row(n + 1).head(n) = weights.transpose();
        system(n + 1, n) = 0.0;
        rhs[n + 1] = 0.0;

        const Vector z = solve_least_squares_checked(system, rhs);
        nu = z.head(n);
        lambda = z[n];
    } else {
        // General f: descend on (nu, lambda). The objective never sees the
        // nu offset, so the gauge is applied after convergence.
        const auto unpack = [n](const Vector& z) {
            return std::pair<Vector, double>(z.head(n), z[n]);
        };
        const auto objective = [&](const Vector& z) {
            auto [v, lam] = unpack(z);
            const Vector x = (r + M * v).array() - lam;
            double penalty = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                penalty += weights[i] * cfg.divergence.f_star(x[i] / cfg.alpha);
            }
            return lam + cfg.alpha * penalty;
        };
        const auto gradient = [&](const Vector& z) -> Vector {
            auto [v, lam] = unpack(z);
            const Vector x = (r + M * v).array() - lam;
            Vector scaled(n);
            for (int i = 0; i < n; ++i) {
                scaled[i] = weights[i] * cfg.divergence.f_star_prime(x[i] / cfg.alpha);
            }
            Vector g(n + 1);
            g.head(n) = M.transpose() * scaled;
            g[n] = 1.0 - scaled.sum();
            return g;
        };
        Vector z0 = Vector::Zero(n + 1);
        z0[n] = weights.dot(r);
        Vector z = descend(std::move(z0), objective, gradient, cfg.inner_tolerance,
                           cfg.inner_max_iters, "undiscounted solve");
        nu = z.head(n);
        lambda = z[n];
        nu.array() -= weights.dot(nu);  // gauge E_{d_D}[nu] = 0
    }

    AlgaeSolution solution{ValueTable(mdp.num_states(), mdp.num_actions(), nu), Matrix(), lambda,
                           0.0};
    const Vector x = (r + M * nu).array() - lambda;
    const int A_count = mdp.num_actions();
    solution.zeta = Matrix(mdp.num_states(), A_count);
    double value = lambda;
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < A_count; ++a) {
            const int i = pair_index(s, a, A_count);
            solution.zeta(s, a) = cfg.divergence.f_star_prime(x[i] / cfg.alpha);
            value += cfg.alpha * weights[i] * cfg.divergence.f_star(x[i] / cfg.alpha);
        }
    }
    solution.objective = value;
    return solution;
}

double ope_estimate(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                    const AlgaeConfig& cfg) {
    if (cfg.gamma_one_mode) {
        return undiscounted_solve(mdp, pi, d_D, cfg).objective;
    }
    if (cfg.alpha == 0.0) {
        // Bilinear Lagrangian at the exact ratio: the nu terms cancel and the
        // estimate reduces to E_{d_pi}[r].
        const Matrix w = density_ratio(visitation(mdp, pi), d_D);
        double value = 0.0;
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                value += d_D(s, a) * w(s, a) * mdp.reward(s, a);
        return value;
    }
    return solve_nu(mdp, pi, d_D, cfg).objective;
}

double ope_estimate(const TabularMdp& mdp, const SoftmaxPolicy& pi, const ExperienceSet& data,
                    double smoothing, const AlgaeConfig& cfg) {
    const Occupancy d_D =
        empirical_distribution(data, mdp.num_states(), mdp.num_actions(), smoothing);
    return ope_estimate(mdp, pi, d_D, cfg);
}

} // namespace algae
