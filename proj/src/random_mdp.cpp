#include "algae/random_mdp.hpp"

#include <cmath>

namespace algae {

namespace {

Vector random_distribution(RandomStream& stream, int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i) v[i] = -std::log(1.0 - stream.uniform());
    v /= v.sum();
    return v;
}

} // namespace

TabularMdp random_mdp(RandomStream& stream, const RandomMdpOptions& options) {
    const int S = options.num_states;
    const int A = options.num_actions;
    Matrix reward(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            reward(s, a) = stream.uniform(options.reward_low, options.reward_high);
    Matrix transition(S * A, S);
    for (int idx = 0; idx < S * A; ++idx) {
        transition.row(idx) = random_distribution(stream, S).transpose();
    }
    Vector initial = random_distribution(stream, S);
    return TabularMdp(S, A, reward, transition, initial, options.discount);
}

SoftmaxPolicy random_policy(RandomStream& stream, int num_states, int num_actions) {
    Matrix logits(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) logits(s, a) = stream.uniform(-1.5, 1.5);
    return SoftmaxPolicy(logits);
}

RandomMdpOptions random_size(RandomStream& stream, int max_states, int max_actions,
                             double discount) {
    RandomMdpOptions options;
    options.num_states = 2 + static_cast<int>(stream.uniform() * (max_states - 1));
    options.num_actions = 2 + static_cast<int>(stream.uniform() * (max_actions - 1));
    options.discount = discount;
    return options;
}

} // namespace algae
