#pragma once

#include <cstdint>

#include "algae/mdp.hpp"
#include "algae/rng.hpp"

namespace algae {

/// Knobs for random test instances. Dense transitions (every entry positive)
/// make every pair reachable and every induced chain unichain.
struct RandomMdpOptions {
    int num_states = 5;
    int num_actions = 3;
    double discount = 0.9;
    double reward_low = -1.0;
    double reward_high = 1.0;
};

/// Dirichlet-style random MDP: transition rows and the initial distribution
/// are normalized exponentials, rewards are uniform in [low, high].
TabularMdp random_mdp(RandomStream& stream, const RandomMdpOptions& options = {});

/// Random softmax policy with logits uniform in [-1.5, 1.5]; all action
/// probabilities stay comfortably positive.
SoftmaxPolicy random_policy(RandomStream& stream, int num_states, int num_actions);

/// Size sampled uniformly in [2, max_states] x [2, max_actions].
RandomMdpOptions random_size(RandomStream& stream, int max_states, int max_actions,
                             double discount);

} // namespace algae
