#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "algae/errors.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"
#include "algae/serialization.hpp"

using namespace algae;

TEST_CASE("mdp json round-trip") {
    RandomStream stream(3);
    const TabularMdp mdp = random_mdp(stream, {});
    const nlohmann::json j = mdp_to_json(mdp);
    const TabularMdp back = mdp_from_json(j);
    CHECK(back.num_states() == mdp.num_states());
    CHECK(back.num_actions() == mdp.num_actions());
    CHECK(back.discount() == mdp.discount());
    CHECK((back.reward_flat() - mdp.reward_flat()).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.transition_matrix() - mdp.transition_matrix()).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(mdp_to_json(back) == j);
}

TEST_CASE("mdp json validates probabilities on load") {
    RandomStream stream(5);
    nlohmann::json j = mdp_to_json(random_mdp(stream, {}));
    j["transition"][0][0][0] = 0.9;  // break a row sum
    j["transition"][0][0][1] = 0.0;
    CHECK_THROWS_AS(mdp_from_json(j), ValidationError);
    CHECK_THROWS_AS(mdp_from_json(nlohmann::json{{"num_states", 1}}), ValidationError);
}

TEST_CASE("policy json round-trip") {
    RandomStream stream(7);
    const SoftmaxPolicy pi = random_policy(stream, 4, 3);
    const SoftmaxPolicy back = policy_from_json(policy_to_json(pi));
    CHECK((back.logits() - pi.logits()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("metrics csv is stable and schema-complete") {
    std::vector<StepMetrics> metrics{{0, 0.5, 1.25, 1e-9, 0.125},
                                     {1, 0.625, 1.0, 2e-9, 0.0625}};
    const std::string csv = metrics_to_csv(metrics, "algae", "offline", 7);
    CHECK(csv.find("step,dual_return,objective,zeta_error,grad_norm,method,mode,seed") == 0);
    CHECK(csv.find("0,0.5,1.25,") != std::string::npos);
    CHECK(csv.find(",algae,offline,7") != std::string::npos);
    CHECK(csv == metrics_to_csv(metrics, "algae", "offline", 7));
}

TEST_CASE("content hash is deterministic and sensitive") {
    const std::string a = content_hash("some bytes");
    CHECK(a == content_hash("some bytes"));
    CHECK(a != content_hash("some bytes!"));
    CHECK(a.size() == 16);
}
