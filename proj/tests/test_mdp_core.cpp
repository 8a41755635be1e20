#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "algae/errors.hpp"
#include "algae/mdp_core.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"

#include "test_util.hpp"

using namespace algae;
using namespace algae::test;

TEST_CASE("validation rejects malformed tables") {
    Matrix r(1, 1);
    r << 1.0;
    Matrix bad_t(1, 1);
    bad_t << 0.7;  // row does not sum to 1
    Vector mu0(1);
    mu0 << 1.0;
    CHECK_THROWS_AS(TabularMdp(1, 1, r, bad_t, mu0, 0.5), ValidationError);

    Matrix t(1, 1);
    t << 1.0;
    Vector bad_mu0(1);
    bad_mu0 << 0.4;
    CHECK_THROWS_AS(TabularMdp(1, 1, r, t, bad_mu0, 0.5), ValidationError);
    CHECK_THROWS_AS(TabularMdp(1, 1, r, t, mu0, 1.5), ValidationError);
}

TEST_CASE("softmax policy rows are distributions and shift invariant") {
    RandomStream stream(7);
    const SoftmaxPolicy pi = random_policy(stream, 4, 3);
    for (int s = 0; s < 4; ++s) {
        CHECK(pi.probabilities().row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    Matrix shifted = pi.logits();
    shifted.row(2).array() += 17.5;
    const SoftmaxPolicy other(shifted);
    CHECK((other.probabilities() - pi.probabilities()).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("policy transition matrix") {
    SUBCASE("one-state one-action gives [1]") {
        const Matrix P = policy_transition_matrix(one_state_mdp(), one_state_policy());
        REQUIRE(P.rows() == 1);
        CHECK(P(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("deterministic cycle gives a permutation") {
        const Matrix P = policy_transition_matrix(two_state_cycle(), SoftmaxPolicy::uniform(2, 1));
        CHECK(P(0, 1) == doctest::Approx(1.0));
        CHECK(P(1, 0) == doctest::Approx(1.0));
        CHECK(P(0, 0) == doctest::Approx(0.0));
        CHECK(P(1, 1) == doctest::Approx(0.0));
    }
    SUBCASE("rows sum to one") {
        RandomStream stream(11);
        RandomMdpOptions options;
        options.num_states = 4;
        options.num_actions = 2;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 4, 2);
        const Matrix P = policy_transition_matrix(mdp, pi);
        for (int row = 0; row < P.rows(); ++row) {
            // direct summation oracle
            double sum = 0.0;
            for (int col = 0; col < P.cols(); ++col) sum += P(row, col);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("bellman operator") {
    SUBCASE("zero continuation returns the reward table") {
        RandomStream stream(13);
        const TabularMdp mdp = random_mdp(stream, {});
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const ValueTable out =
            bellman(mdp, pi, ValueTable::zeros(mdp.num_states(), mdp.num_actions()));
        CHECK((out.flat() - mdp.reward_flat()).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
    SUBCASE("one-state arithmetic") {
        Vector nu(1);
        nu << 2.0;
        const ValueTable out =
            bellman(one_state_mdp(), one_state_policy(), ValueTable(1, 1, nu));
        CHECK(out(0, 0) == doctest::Approx(2.0));  // 1 + 0.5 * 2
    }
    SUBCASE("matches the matrix form r + gamma P nu") {
        RandomStream stream(17);
        RandomMdpOptions options;
        options.num_states = 4;
        options.num_actions = 3;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 4, 3);
        Vector nu(mdp.num_pairs());
        for (int i = 0; i < mdp.num_pairs(); ++i) nu[i] = stream.uniform(-2.0, 2.0);
        const Vector expected = mdp.reward_flat() +
                                mdp.discount() * policy_transition_matrix(mdp, pi) * nu;
        const Vector got = bellman(mdp, pi, ValueTable(4, 3, nu)).flat();
        CHECK((got - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("transpose bellman operator") {
    SUBCASE("gamma = 0 keeps only the initial term") {
        RandomStream stream(19);
        RandomMdpOptions options;
        options.discount = 0.0;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy rho(mdp.num_states(), mdp.num_actions(),
                            Vector::Constant(mdp.num_pairs(), 1.0 / mdp.num_pairs()));
        const Occupancy out = transpose_bellman(mdp, pi, rho);
        const Vector expected = initial_pair_distribution(mdp, pi);
        CHECK((out.flat() - expected).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
    SUBCASE("one-state arithmetic") {
        Vector rho(1);
        rho << 1.0;
        const Occupancy out =
            transpose_bellman(one_state_mdp(), one_state_policy(), Occupancy(1, 1, rho));
        CHECK(out(0, 0) == doctest::Approx(1.0));  // 0.5 * 1 + 0.5 * 1
    }
    SUBCASE("iterating converges to the closed-form visitation") {
        RandomStream stream(23);
        const TabularMdp mdp = random_mdp(stream, {});
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        Occupancy rho(mdp.num_states(), mdp.num_actions(),
                      Vector::Constant(mdp.num_pairs(), 1.0 / mdp.num_pairs()));
        for (int t = 0; t < 600; ++t) rho = transpose_bellman(mdp, pi, rho);
        const Occupancy direct = visitation(mdp, pi);
        CHECK((rho.flat() - direct.flat()).lpNorm<Eigen::Infinity>() <= 1e-9);
        // normalization is preserved
        CHECK(rho.is_normalized());
    }
}

TEST_CASE("q values") {
    SUBCASE("geometric series") {
        const ValueTable q = q_values(one_state_mdp(), one_state_policy());
        CHECK(q(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("zero rewards give zero values") {
        RandomStream stream(29);
        const TabularMdp mdp = random_mdp(stream, {}).with_reward(Matrix::Zero(5, 3));
        const SoftmaxPolicy pi = random_policy(stream, 5, 3);
        CHECK(q_values(mdp, pi).flat().lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SUBCASE("matches the truncated Neumann series") {
        RandomStream stream(31);
        RandomMdpOptions options;
        options.num_states = 6;
        options.num_actions = 2;
        options.discount = 0.9;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 6, 2);
        // oracle: sum_{t<10000} gamma^t P^t r
        const Matrix P = policy_transition_matrix(mdp, pi);
        Vector series = Vector::Zero(mdp.num_pairs());
        Vector term = mdp.reward_flat();
        for (int t = 0; t < 10000; ++t) {
            series += term;
            term = mdp.discount() * (P * term);
        }
        const ValueTable q = q_values(mdp, pi);
        CHECK((q.flat() - series).lpNorm<Eigen::Infinity>() <= 1e-6);
        // fixed point of the operator
        CHECK((bellman(mdp, pi, q).flat() - q.flat()).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("gamma = 1 is rejected") {
        RandomStream stream(37);
        RandomMdpOptions options;
        options.discount = 1.0;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        CHECK_THROWS_AS(q_values(mdp, pi), ValidationError);
    }
}

TEST_CASE("visitation distribution") {
    SUBCASE("gamma = 0 is the initial pair distribution") {
        RandomStream stream(41);
        RandomMdpOptions options;
        options.discount = 0.0;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d = visitation(mdp, pi);
        CHECK((d.flat() - initial_pair_distribution(mdp, pi)).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SUBCASE("one-state mass is one") {
        const Occupancy d = visitation(one_state_mdp(), one_state_policy());
        CHECK(d(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("matches the truncated series") {
        RandomStream stream(43);
        RandomMdpOptions options;
        options.num_states = 5;
        options.num_actions = 3;
        options.discount = 0.9;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 5, 3);
        // oracle: (1-gamma) sum_{t<=2000} gamma^t (P^T)^t (mu0 pi)
        const Matrix Pt = policy_transition_matrix(mdp, pi).transpose();
        Vector term = initial_pair_distribution(mdp, pi);
        Vector series = Vector::Zero(mdp.num_pairs());
        for (int t = 0; t <= 2000; ++t) {
            series += term;
            term = mdp.discount() * (Pt * term);
        }
        series *= (1.0 - mdp.discount());
        const Occupancy d = visitation(mdp, pi);
        CHECK((d.flat() - series).lpNorm<Eigen::Infinity>() <= 1e-8);
        CHECK(d.is_normalized());
        CHECK(d.flat().minCoeff() >= 0.0);
        // unique fixed point of the transpose operator
        CHECK((transpose_bellman(mdp, pi, d).flat() - d.flat()).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("stationary distribution") {
    SUBCASE("symmetric swap chain splits mass evenly") {
        const TabularMdp mdp = two_state_cycle(1.0);
        const Occupancy d = stationary_distribution(mdp, SoftmaxPolicy::uniform(2, 1));
        CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("one-state chain") {
        const Occupancy d =
            stationary_distribution(one_state_mdp(1.0), one_state_policy());
        CHECK(d(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("matches long power iteration on an ergodic chain") {
        RandomStream stream(47);
        RandomMdpOptions options;
        options.num_states = 5;
        options.num_actions = 2;
        options.discount = 1.0;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 5, 2);
        const Matrix Pt = policy_transition_matrix(mdp, pi).transpose();
        Vector iterate = Vector::Constant(mdp.num_pairs(), 1.0 / mdp.num_pairs());
        for (int t = 0; t < 10000; ++t) iterate = Pt * iterate;
        const Occupancy d = stationary_distribution(mdp, pi);
        CHECK((d.flat() - iterate).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("disconnected chain is rejected") {
        // Two isolated 2-state blocks.
        Matrix r = Matrix::Zero(4, 1);
        Matrix t = Matrix::Zero(4, 4);
        t(0, 1) = 1.0;
        t(1, 0) = 1.0;
        t(2, 3) = 1.0;
        t(3, 2) = 1.0;
        Vector mu0 = Vector::Constant(4, 0.25);
        const TabularMdp mdp(4, 1, r, t, mu0, 1.0);
        CHECK_FALSE(has_unique_recurrent_class(mdp, SoftmaxPolicy::uniform(4, 1)));
        CHECK_THROWS_AS(stationary_distribution(mdp, SoftmaxPolicy::uniform(4, 1)),
                        ErgodicityError);
    }
}

TEST_CASE("returns") {
    SUBCASE("one-state") {
        CHECK(primal_return(one_state_mdp(), one_state_policy()) == doctest::Approx(1.0));
        CHECK(dual_return(one_state_mdp(), one_state_policy()) == doctest::Approx(1.0));
    }
    SUBCASE("constant rewards give the constant") {
        RandomStream stream(53);
        const TabularMdp mdp =
            random_mdp(stream, {}).with_reward(Matrix::Constant(5, 3, 0.7));
        const SoftmaxPolicy pi = random_policy(stream, 5, 3);
        CHECK(primal_return(mdp, pi) == doctest::Approx(0.7).epsilon(1e-10));
        CHECK(dual_return(mdp, pi) == doctest::Approx(0.7).epsilon(1e-10));
    }
    SUBCASE("strong duality on random instances") {
        for (int k = 0; k < 20; ++k) {
            RandomStream stream(59, k);
            const double gamma = k % 3 == 0 ? 0.5 : (k % 3 == 1 ? 0.9 : 0.99);
            const TabularMdp mdp = random_mdp(stream, random_size(stream, 10, 4, gamma));
            const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
            CHECK(std::abs(primal_return(mdp, pi) - dual_return(mdp, pi)) <= 1e-9);
        }
    }
    SUBCASE("feasible dual values upper-bound the return") {
        RandomStream stream(61);
        const TabularMdp mdp = random_mdp(stream, {});
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        Vector raw(mdp.num_pairs());
        for (int i = 0; i < mdp.num_pairs(); ++i) raw[i] = stream.uniform(-2.0, 2.0);
        const ValueTable attempt(mdp.num_states(), mdp.num_actions(), raw);
        const Vector residual = bellman(mdp, pi, attempt).flat() - attempt.flat();
        const double lift = std::max(0.0, residual.maxCoeff()) / (1.0 - mdp.discount());
        const ValueTable feasible(mdp.num_states(), mdp.num_actions(),
                                  raw.array() + lift + 1e-12);
        const double bound =
            (1.0 - mdp.discount()) * initial_pair_distribution(mdp, pi).dot(feasible.flat());
        CHECK(bound >= primal_return(mdp, pi) - 1e-9);
    }
}

TEST_CASE("on-policy policy gradient") {
    SUBCASE("constant rewards have zero gradient") {
        RandomStream stream(67);
        const TabularMdp mdp =
            random_mdp(stream, {}).with_reward(Matrix::Constant(5, 3, 0.3));
        const SoftmaxPolicy pi = random_policy(stream, 5, 3);
        CHECK(on_policy_policy_gradient(mdp, pi).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("single action has zero gradient") {
        CHECK(on_policy_policy_gradient(one_state_mdp(), one_state_policy())
                  .lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SUBCASE("matches finite differences of the primal return") {
        RandomStream stream(71);
        RandomMdpOptions options;
        options.num_states = 4;
        options.num_actions = 3;
        options.discount = 0.8;
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, 4, 3);
        const Matrix grad = on_policy_policy_gradient(mdp, pi);
        const Matrix fd = fd_gradient(
            [&](const Matrix& logits) { return primal_return(mdp, SoftmaxPolicy(logits)); },
            pi.logits());
        const double scale = std::max(1e-12, grad.lpNorm<Eigen::Infinity>());
        CHECK((grad - fd).lpNorm<Eigen::Infinity>() / scale <= 1e-5);
    }
    SUBCASE("reward override changes the critic but not the visitation") {
        RandomStream stream(73);
        const TabularMdp mdp = random_mdp(stream, {});
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        Matrix override_table = Matrix::Constant(mdp.num_states(), mdp.num_actions(), 0.1);
        const Matrix grad =
            on_policy_policy_gradient(mdp, pi, ValueTable::from_table(override_table));
        CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-9);  // constant override: all policies equal
    }
}
