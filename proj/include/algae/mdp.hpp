#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "algae/errors.hpp"

namespace algae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance for probability tables supplied as input.
inline constexpr double kProbabilityTolerance = 1e-12;

/// State-action pairs are flattened to index s * num_actions + a everywhere.
inline int pair_index(int state, int action, int num_actions) {
    return state * num_actions + action;
}

/// Finite MDP <S, A, r, T, mu0> with discount gamma in [0, 1].
///
/// All tables are dense. The transition table is stored as an
/// (S*A) x S matrix whose row (s,a) is the distribution over next states;
/// rewards are stored flat over pairs. Probability rows are validated on
/// construction and rewards must be finite (bounded-reward assumption).
/// Instances are immutable and safe to share across threads.
class TabularMdp {
public:
    TabularMdp(int num_states, int num_actions, Matrix reward, Matrix transition,
               Vector initial_dist, double discount);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int num_pairs() const { return num_states_ * num_actions_; }
    double discount() const { return discount_; }

    double reward(int s, int a) const { return reward_[pair_index(s, a, num_actions_)]; }
    /// Rewards flattened over pairs, length S*A.
    const Vector& reward_flat() const { return reward_; }

    double transition(int s, int a, int s_next) const {
        return transition_(pair_index(s, a, num_actions_), s_next);
    }
    /// Row (s,a) is the next-state distribution, shape (S*A) x S.
    const Matrix& transition_matrix() const { return transition_; }

    const Vector& initial_dist() const { return initial_dist_; }

    /// Largest reward magnitude (the declared R_max).
    double reward_bound() const { return reward_bound_; }

    /// Same dynamics and rewards under a different discount.
    TabularMdp with_discount(double discount) const;
    /// Same dynamics and discount with the reward table replaced.
    TabularMdp with_reward(const Matrix& reward) const;

private:
    int num_states_;
    int num_actions_;
    Vector reward_;      // flat over pairs
    Matrix transition_;  // (S*A) x S
    Vector initial_dist_;
    double discount_;
    double reward_bound_;
};

/// Tabular softmax policy: logits theta[s,a] induce
/// pi(a|s) = exp(theta[s,a]) / sum_b exp(theta[s,b]).
///
/// The logit table is the only differentiable object in the library;
/// training updates produce a new policy by value.
class SoftmaxPolicy {
public:
    explicit SoftmaxPolicy(Matrix logits);

    static SoftmaxPolicy uniform(int num_states, int num_actions) {
        return SoftmaxPolicy(Matrix::Zero(num_states, num_actions));
    }

    int num_states() const { return static_cast<int>(logits_.rows()); }
    int num_actions() const { return static_cast<int>(logits_.cols()); }

    const Matrix& logits() const { return logits_; }

    /// Row-stochastic S x A probability table (rows are per-state softmax).
    const Matrix& probabilities() const { return probs_; }
    double prob(int s, int a) const { return probs_(s, a); }

private:
    Matrix logits_;
    Matrix probs_;
};

/// Nonnegative weights over state-action pairs. Holds visitation
/// distributions and data distributions; not forced to sum to one because
/// intermediate dual iterates may be unnormalized.
class Occupancy {
public:
    Occupancy(int num_states, int num_actions, Vector weights);

    static Occupancy zeros(int num_states, int num_actions) {
        return Occupancy(num_states, num_actions, Vector::Zero(num_states * num_actions));
    }

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

    double operator()(int s, int a) const { return weights_[pair_index(s, a, num_actions_)]; }
    const Vector& flat() const { return weights_; }

    double total() const { return weights_.sum(); }
    bool is_normalized(double tol = 1e-10) const { return std::abs(total() - 1.0) <= tol; }

    /// Per-state mass, length S.
    Vector state_marginal() const;

    /// S x A view of the weights.
    Matrix table() const;

private:
    int num_states_;
    int num_actions_;
    Vector weights_;  // flat over pairs
};

/// Real-valued table over state-action pairs (dual value functions,
/// Q tables, reward overrides). Entries must be finite.
class ValueTable {
public:
    ValueTable(int num_states, int num_actions, Vector values);

    static ValueTable zeros(int num_states, int num_actions) {
        return ValueTable(num_states, num_actions, Vector::Zero(num_states * num_actions));
    }
    static ValueTable from_table(const Matrix& table);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

    double operator()(int s, int a) const { return values_[pair_index(s, a, num_actions_)]; }
    const Vector& flat() const { return values_; }

    Matrix table() const;

private:
    int num_states_;
    int num_actions_;
    Vector values_;  // flat over pairs
};

} // namespace algae
