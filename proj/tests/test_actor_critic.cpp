#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "algae/actor_critic.hpp"
#include "algae/dataset.hpp"
#include "algae/mdp_core.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"

#include "test_util.hpp"

using namespace algae;
using namespace algae::test;

namespace {

double frozen_surrogate(const TabularMdp& mdp, const SoftmaxPolicy& pi, const ValueTable& q,
                        const Vector& marginal) {
    double value = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            value += marginal[s] * pi.prob(s, a) * q(s, a);
    return value;
}

} // namespace

TEST_CASE("actor-critic step") {
    RandomStream stream(61);
    const TabularMdp mdp = random_mdp(stream, {});
    const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const Occupancy d_D = exact_behavior_distribution(mdp, mu);

    SUBCASE("uniform rewards leave the induced policy unchanged") {
        const TabularMdp flat =
            mdp.with_reward(Matrix::Constant(mdp.num_states(), mdp.num_actions(), 0.4));
        const SoftmaxPolicy stepped = actor_critic_step(flat, pi, d_D, 0.5);
        CHECK((stepped.probabilities() - pi.probabilities()).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("zero learning rate is the identity") {
        const SoftmaxPolicy stepped = actor_critic_step(mdp, pi, d_D, 0.0);
        CHECK((stepped.logits() - pi.logits()).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("one step increases the frozen-Q surrogate") {
        const ValueTable q = q_values(mdp, pi);
        const Vector marginal = d_D.state_marginal();
        const SoftmaxPolicy stepped = actor_critic_step(mdp, pi, d_D, 0.5);
        CHECK(frozen_surrogate(mdp, stepped, q, marginal) >
              frozen_surrogate(mdp, pi, q, marginal));
    }
    SUBCASE("semi-gradient equals finite differences of the surrogate") {
        const ValueTable q = q_values(mdp, pi);
        const Vector marginal = d_D.state_marginal();
        const Matrix grad = actor_critic_gradient(mdp, pi, d_D);
        const Matrix fd = fd_gradient(
            [&](const Matrix& logits) {
                return frozen_surrogate(mdp, SoftmaxPolicy(logits), q, marginal);
            },
            pi.logits(), 1e-6);
        CHECK((grad - fd).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("actor-critic training loop") {
    RandomStream stream(67);
    const TabularMdp mdp = random_mdp(stream, {});
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const Occupancy d_D = exact_behavior_distribution(mdp, mu);
    const OccupancyProvider provider = [&d_D](const SoftmaxPolicy&, int) { return d_D; };

    SUBCASE("zero steps reports the uniform policy") {
        const TrainResult result = train_actor_critic(mdp, provider, 0, 0.1);
        REQUIRE(result.metrics.size() == 1);
        CHECK(result.policy.logits().lpNorm<Eigen::Infinity>() == 0.0);
        CHECK(result.metrics[0].dual_return ==
              doctest::Approx(dual_return(
                  mdp, SoftmaxPolicy::uniform(mdp.num_states(), mdp.num_actions()))));
    }
    SUBCASE("training improves the true return") {
        const TrainResult result = train_actor_critic(mdp, provider, 40, 0.5);
        CHECK(result.metrics.back().dual_return > result.metrics.front().dual_return);
        CHECK(std::isnan(result.metrics.back().zeta_error));
    }
}
