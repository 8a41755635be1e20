#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "algae/dataset.hpp"
#include "algae/errors.hpp"
#include "algae/four_rooms.hpp"
#include "algae/mdp_core.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"

#include "test_util.hpp"

using namespace algae;
using namespace algae::test;

TEST_CASE("collect produces the requested shape") {
    SUBCASE("four rooms protocol counts") {
        const FourRooms env{};
        const SoftmaxPolicy uniform =
            SoftmaxPolicy::uniform(env.mdp().num_states(), env.mdp().num_actions());
        const ExperienceSet data = collect(env.mdp(), uniform, 500, 10, 1);
        CHECK(data.transitions.size() == 5000);
        CHECK(data.initial_states.size() == 500);
    }
    SUBCASE("minimal roll-out") {
        const ExperienceSet data = collect(one_state_mdp(), one_state_policy(), 1, 1, 0);
        REQUIRE(data.transitions.size() == 1);
        CHECK(data.transitions[0].state == 0);
        CHECK(data.transitions[0].reward == doctest::Approx(1.0));
        CHECK(data.initial_states == std::vector<int>{0});
    }
    SUBCASE("rejects empty requests") {
        CHECK_THROWS_AS(collect(one_state_mdp(), one_state_policy(), 0, 5, 0), ValidationError);
    }
}

TEST_CASE("collect is deterministic in the seed") {
    RandomStream stream(101);
    const TabularMdp mdp = random_mdp(stream, {});
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const ExperienceSet a = collect(mdp, mu, 25, 7, 42);
    const ExperienceSet b = collect(mdp, mu, 25, 7, 42);
    CHECK(a == b);
    const ExperienceSet c = collect(mdp, mu, 25, 7, 43);
    CHECK(a.transitions != c.transitions);
    // rewards come from the table
    for (const Transition& t : a.transitions) {
        CHECK(t.reward == mdp.reward(t.state, t.action));
    }
}

TEST_CASE("empirical distribution") {
    SUBCASE("pure counting") {
        ExperienceSet data;
        data.transitions.push_back({0, 0, 1.0, 1});
        const Occupancy d = empirical_distribution(data, 2, 1, 0.0);
        CHECK(d(0, 0) == doctest::Approx(1.0));
        CHECK(d(1, 0) == doctest::Approx(0.0));
    }
    SUBCASE("smoothing keeps every pair positive") {
        ExperienceSet data;
        data.transitions.push_back({0, 0, 1.0, 1});
        const Occupancy d = empirical_distribution(data, 3, 2, 1e-3);
        CHECK(d.flat().minCoeff() > 0.0);
        CHECK(d.is_normalized(1e-12));
    }
    SUBCASE("near-uniform data covers four rooms with finite ratios") {
        const FourRooms env{};
        const SoftmaxPolicy uniform =
            SoftmaxPolicy::uniform(env.mdp().num_states(), env.mdp().num_actions());
        const ExperienceSet data = collect(env.mdp(), uniform, 500, 10, 3);
        const Occupancy d =
            empirical_distribution(data, env.mdp().num_states(), env.mdp().num_actions(), 0.0);
        double lo = 1.0, hi = 0.0;
        for (int s = 0; s < env.mdp().num_states(); ++s) {
            for (int a = 0; a < env.mdp().num_actions(); ++a) {
                lo = std::min(lo, d(s, a));
                hi = std::max(hi, d(s, a));
            }
        }
        CHECK(lo > 0.0);       // every pair visited
        CHECK(hi / lo <= 50.0);  // and no pair dominates
    }
}

TEST_CASE("exact behavior distribution delegates to visitation") {
    RandomStream stream(103);
    const TabularMdp mdp = random_mdp(stream, {});
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const Occupancy expected = visitation(mdp, mu);
    const Occupancy got = exact_behavior_distribution(mdp, mu);
    CHECK((expected.flat() - got.flat()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("experience files round-trip bit-exactly") {
    RandomStream stream(107);
    const TabularMdp mdp = random_mdp(stream, {});
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
    const ExperienceSet data = collect(mdp, mu, 10, 4, 9);

    std::ostringstream first;
    save_experience(data, mdp.num_states(), mdp.num_actions(), first);
    std::istringstream input(first.str());
    const LoadedExperience loaded = load_experience(input);
    CHECK(loaded.num_states == mdp.num_states());
    CHECK(loaded.num_actions == mdp.num_actions());
    CHECK(loaded.data == data);

    std::ostringstream second;
    save_experience(loaded.data, loaded.num_states, loaded.num_actions, second);
    CHECK(first.str() == second.str());
}

TEST_CASE("estimates approach the fixed-horizon occupancy") {
    RandomStream stream(109);
    RandomMdpOptions options;
    options.num_states = 4;
    options.num_actions = 2;
    const TabularMdp mdp = random_mdp(stream, options);
    const SoftmaxPolicy mu = random_policy(stream, 4, 2);

    const int horizon = 8;
    Vector beta = mdp.initial_dist();
    Vector analytic = Vector::Zero(mdp.num_pairs());
    for (int t = 0; t < horizon; ++t) {
        Vector rho(mdp.num_pairs());
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a)
                rho[pair_index(s, a, 2)] = beta[s] * mu.prob(s, a);
        analytic += rho / horizon;
        beta = mdp.transition_matrix().transpose() * rho;
    }

    double previous = -1.0;
    for (int trajectories : {10, 1000, 100000}) {
        const ExperienceSet data = collect(mdp, mu, trajectories, horizon, 11);
        const Occupancy d = empirical_distribution(data, 4, 2, 0.0);
        const double l1 = (d.flat() - analytic).lpNorm<1>();
        if (previous >= 0.0) CHECK(l1 < previous);
        previous = l1;
    }
}
