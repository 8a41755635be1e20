#pragma once

#include <optional>

#include "algae/mdp.hpp"

namespace algae {

/// Joint state-action transition matrix of the chain induced by pi:
/// entry ((s,a), (s',a')) = T(s'|s,a) * pi(a'|s'). Shape (S*A) x (S*A);
/// every row sums to 1.
Matrix policy_transition_matrix(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Expected Bellman operator: out[s,a] = r(s,a) + gamma * E_{s',a'}[nu(s',a')]
/// with s' ~ T(s,a) and a' ~ pi(s').
ValueTable bellman(const TabularMdp& mdp, const SoftmaxPolicy& pi, const ValueTable& nu);

/// Adjoint of the Bellman operator acting on occupancies:
/// out(s',a') = gamma * sum_{s,a} pi(a'|s') T(s'|s,a) rho(s,a)
///              + (1-gamma) * mu0(s') pi(a'|s').
/// Its fixed point is the visitation distribution of pi.
Occupancy transpose_bellman(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                            const Occupancy& rho);

/// Exact Q table of pi: the unique solution of (I - gamma P_pi) Q = r.
/// Requires discount < 1.
ValueTable q_values(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Normalized discounted state-action visitation of pi, computed as the
/// closed-form solve (1-gamma)(I - gamma P_pi^T)^{-1}(mu0 pi).
/// Requires discount < 1; tiny negative entries are clamped and the result
/// renormalized.
Occupancy visitation(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Stationary state-action distribution of the induced chain (the gamma = 1
/// counterpart of visitation). Requires a unique recurrent class; throws
/// ErgodicityError otherwise.
Occupancy stationary_distribution(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// True when the chain induced by pi has a single recurrent class reachable
/// from every pair (support-graph check, no numerics).
bool has_unique_recurrent_class(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// (1-gamma) E_{s0 ~ mu0, a0 ~ pi}[Q_pi(s0, a0)].
double primal_return(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// E_{(s,a) ~ d_pi}[r(s,a)]. Dispatches to the stationary distribution when
/// gamma = 1. Equals primal_return for gamma < 1 (linear-program duality).
double dual_return(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Exact policy-gradient-theorem gradient of primal_return with respect to
/// the policy logits: E_{d_pi}[Q(s,a) * dlog pi(a|s)/dtheta]. When
/// reward_override is given, the Q table of the overridden reward is used
/// while the visitation stays that of the MDP's dynamics.
Matrix on_policy_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const std::optional<ValueTable>& reward_override = std::nullopt);

/// Initial state-action distribution mu0(s) * pi(a|s), flat over pairs.
Vector initial_pair_distribution(const TabularMdp& mdp, const SoftmaxPolicy& pi);

/// Gradient of E_{(s,a) ~ weights}[values(s,a)] with respect to the logits of
/// pi when weights(s,a) = state_weight(s) * pi(a|s); equivalently the score-
/// function form state_weight(s) * pi(b|s) * (values(s,b) - mean_pi values(s,.)).
Matrix score_gradient(const SoftmaxPolicy& pi, const Vector& state_weight,
                      const ValueTable& values);

} // namespace algae
