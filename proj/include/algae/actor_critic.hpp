#pragma once

#include "algae/mdp.hpp"
#include "algae/solver.hpp"

namespace algae {

/// One tabular actor-critic update: solve Q_pi exactly, then take a single
/// ascent step on the logits of E_{s ~ d_D}[sum_a pi(a|s) Q_pi(s,a)] with Q
/// treated as a constant (semi-gradient). d_D enters only through its state
/// marginal.
SoftmaxPolicy actor_critic_step(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                const Occupancy& d_D, double learning_rate);

/// Semi-gradient of the frozen-Q surrogate with respect to the logits.
Matrix actor_critic_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                             const Occupancy& d_D);

/// Actor-critic training loop with the same data-provider and metrics
/// contract as train(); objective records the frozen-Q surrogate and
/// zeta_error stays NaN (no ratio estimates exist here).
TrainResult train_actor_critic(const TabularMdp& mdp, const OccupancyProvider& data, int steps,
                               double learning_rate);

} // namespace algae
