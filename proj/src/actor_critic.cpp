#include "algae/actor_critic.hpp"

#include <limits>

#include "algae/errors.hpp"
#include "algae/mdp_core.hpp"

namespace algae {

Matrix actor_critic_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                             const Occupancy& d_D) {
    const ValueTable q = q_values(mdp, pi);
    return score_gradient(pi, d_D.state_marginal(), q);
}

SoftmaxPolicy actor_critic_step(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                const Occupancy& d_D, double learning_rate) {
    return SoftmaxPolicy(pi.logits() + learning_rate * actor_critic_gradient(mdp, pi, d_D));
}

TrainResult train_actor_critic(const TabularMdp& mdp, const OccupancyProvider& data, int steps,
                               double learning_rate) {
    if (steps < 0) throw ValidationError("steps must be nonnegative");
    SoftmaxPolicy pi = SoftmaxPolicy::uniform(mdp.num_states(), mdp.num_actions());
    TrainResult result{pi, {}};
    result.metrics.reserve(steps + 1);

    for (int step = 0; step <= steps; ++step) {
        const Occupancy d_D = data(pi, step);
        const ValueTable q = q_values(mdp, pi);
        const Matrix grad = score_gradient(pi, d_D.state_marginal(), q);

        StepMetrics row;
        row.step = step;
        row.dual_return = dual_return(mdp, pi);
        // Frozen-Q surrogate value under the current policy.
        double surrogate = 0.0;
        const Vector marginal = d_D.state_marginal();
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                surrogate += marginal[s] * pi.prob(s, a) * q(s, a);
        row.objective = surrogate;
        row.grad_norm = grad.lpNorm<Eigen::Infinity>();
        row.zeta_error = std::numeric_limits<double>::quiet_NaN();
        result.metrics.push_back(row);

        if (step < steps) {
            pi = SoftmaxPolicy(pi.logits() + learning_rate * grad);
        }
    }
    result.policy = pi;
    return result;
}

} // namespace algae
