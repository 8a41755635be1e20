#pragma once

#include <functional>
#include <vector>

#include "algae/dataset.hpp"
#include "algae/divergence.hpp"
#include "algae/mdp.hpp"

namespace algae {

/// Saddle-point solver configuration. alpha is the regularization weight
/// (conservative for alpha > 0, exploratory for alpha < 0); gamma_one_mode
/// selects the undiscounted formulation with its scalar dual offset.
struct AlgaeConfig {
    double alpha = 0.01;
    DivergencePair divergence = quadratic();
    bool gamma_one_mode = false;
    double inner_tolerance = 1e-8;
    int inner_max_iters = 100000;
};

/// Solution bundle of the saddle problem: dual value table nu, ratio
/// estimates zeta (S x A), the scalar offset lambda (undiscounted mode only,
/// otherwise 0), and the saddle objective value.
struct AlgaeSolution {
    ValueTable nu;
    Matrix zeta;
    double lambda = 0.0;
    double objective = 0.0;
};

/// Entrywise density ratio d_pi / d_D. Zero where both are zero; throws
/// CoverageError where d_pi is positive but d_D is not.
Matrix density_ratio(const Occupancy& d_pi, const Occupancy& d_D);

/// Pairs reachable under pi from the support of mu0 (support-graph BFS).
std::vector<bool> reachable_pairs(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Off-policy objective in nu alone:
/// (1-gamma) E_{mu0 pi}[nu] + alpha E_{d_D}[f*((B_pi nu - nu)/alpha)],
/// with the exact expected Bellman operator. Requires alpha != 0.
double primal_objective(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                        const ValueTable& nu, const AlgaeConfig& cfg);

/// Regularized Lagrangian in (nu, zeta):
/// (1-gamma) E_{mu0 pi}[nu] + E_{d_D}[zeta (B_pi nu - nu)] - alpha E_{d_D}[f(zeta)].
double lagrangian_objective(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                            const Occupancy& d_D, const ValueTable& nu, const Matrix& zeta,
                            const AlgaeConfig& cfg);

/// Closed-form inner solve for quadratic f: the normal equations of
/// min_nu (1-gamma) b.nu + (1/2 alpha) ||r + (gamma P - I) nu||^2_{d_D}.
/// Requires alpha > 0 and d_D positive on every pair reachable under pi.
AlgaeSolution solve_nu_quadratic(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const Occupancy& d_D, double alpha);

/// Inner solve for any divergence pair: full-batch gradient descent with
/// backtracking line search (ascent when alpha < 0, where the inner problem
/// is concave), warm-started from the quadratic stationary point. Stops at
/// ||grad||_inf <= inner_tolerance or throws ConvergenceError.
AlgaeSolution solve_nu_general(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                               const Occupancy& d_D, const AlgaeConfig& cfg);

/// Dispatch: exact normal equations for quadratic f with alpha > 0,
/// otherwise the general descent path.
AlgaeSolution solve_nu(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                       const AlgaeConfig& cfg);

/// Gradient of the off-policy objective with respect to the policy logits,
/// holding the freshly solved nu* fixed (Danskin direction). With the dual
/// optimized this is exactly the on-policy policy gradient under the
/// divergence-augmented reward.
Matrix policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                       const AlgaeConfig& cfg);

/// As above but reuses / exposes the inner solution.
Matrix policy_gradient_at(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                          const AlgaeConfig& cfg, const AlgaeSolution& solution);

/// Per-step training record. zeta_error is the sup-norm gap between the
/// solver's ratio estimates and the exact density ratio (NaN when the exact
/// ratio is unavailable).
struct StepMetrics {
    int step = 0;
    double dual_return = 0.0;
    double objective = 0.0;
    double zeta_error = 0.0;
    double grad_norm = 0.0;
};

struct TrainResult {
    SoftmaxPolicy policy;
    std::vector<StepMetrics> metrics;
};

/// Supplies the data distribution for a training step; offline training
/// returns a fixed occupancy, online training re-collects with the current
/// policy.
using OccupancyProvider = std::function<Occupancy(const SoftmaxPolicy&, int step)>;

/// Alternates an exact inner solve with one ascent step on the logits.
/// Metrics rows cover every visited policy, including the final one
/// (steps + 1 rows).
TrainResult train(const TabularMdp& mdp, const OccupancyProvider& data, const AlgaeConfig& cfg,
                  int steps, double learning_rate);
TrainResult train(const TabularMdp& mdp, const Occupancy& d_D, const AlgaeConfig& cfg,
                  int steps, double learning_rate);
TrainResult train(const TabularMdp& mdp, const ExperienceSet& data, double smoothing,
                  const AlgaeConfig& cfg, int steps, double learning_rate);

/// Undiscounted saddle solve (cfg.gamma_one_mode must be set): minimizes
/// lambda + alpha E_{d_D}[f*((-lambda + B_pi nu - nu)/alpha)] over
/// (lambda, nu) with the gauge E_{d_D}[nu] = 0 pinning the nu offset.
/// Requires a unichain policy, alpha > 0, and d_D positive on the
/// recurrent support.
AlgaeSolution undiscounted_solve(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const Occupancy& d_D, const AlgaeConfig& cfg);

/// Behavior-agnostic off-policy evaluation: the saddle value, which equals
/// E_{d_pi}[r] - alpha D_f(d_pi || d_D). At alpha = 0 the unregularized
/// bilinear Lagrangian is evaluated at the exact ratio instead.
double ope_estimate(const TabularMdp& mdp, const SoftmaxPolicy& pi, const Occupancy& d_D,
                    const AlgaeConfig& cfg);
double ope_estimate(const TabularMdp& mdp, const SoftmaxPolicy& pi, const ExperienceSet& data,
                    double smoothing, const AlgaeConfig& cfg);

} // namespace algae
