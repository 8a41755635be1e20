#include "algae/mdp.hpp"

#include <cmath>
#include <string>

namespace algae {

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

void check_distribution(const Eigen::Ref<const Vector>& row, const std::string& what) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        const double p = row[i];
        require(std::isfinite(p), what + " contains a non-finite entry");
        require(p >= -kProbabilityTolerance, what + " contains a negative entry");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-10, what + " does not sum to 1");
}

} // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, Matrix reward, Matrix transition,
                       Vector initial_dist, double discount)
    : num_states_(num_states), num_actions_(num_actions),
      transition_(std::move(transition)), initial_dist_(std::move(initial_dist)),
      discount_(discount) {
    require(num_states_ > 0, "num_states must be positive");
    require(num_actions_ > 0, "num_actions must be positive");
    require(reward.rows() == num_states_ && reward.cols() == num_actions_,
            "reward table must be S x A");
    require(transition_.rows() == static_cast<Eigen::Index>(num_pairs()) &&
                transition_.cols() == num_states_,
            "transition table must be (S*A) x S");
    require(initial_dist_.size() == num_states_, "initial distribution must have length S");
    require(discount_ >= 0.0 && discount_ <= 1.0, "discount must lie in [0, 1]");

    for (int idx = 0; idx < num_pairs(); ++idx) {
        check_distribution(transition_.row(idx).transpose(),
                           "transition row (s=" + std::to_string(idx / num_actions_) +
                               ", a=" + std::to_string(idx % num_actions_) + ")");
    }
    check_distribution(initial_dist_, "initial distribution");

    reward_ = Vector(num_pairs());
    reward_bound_ = 0.0;
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions_; ++a) {
            const double r = reward(s, a);
            require(std::isfinite(r), "reward table contains a non-finite entry");
            reward_[pair_index(s, a, num_actions_)] = r;
            reward_bound_ = std::max(reward_bound_, std::abs(r));
        }
    }
}

TabularMdp TabularMdp::with_discount(double discount) const {
    TabularMdp copy = *this;
    require(discount >= 0.0 && discount <= 1.0, "discount must lie in [0, 1]");
    copy.discount_ = discount;
    return copy;
}

TabularMdp TabularMdp::with_reward(const Matrix& reward) const {
    Matrix reward_table(num_states_, num_actions_);
    reward_table = reward;
    return TabularMdp(num_states_, num_actions_, reward_table, transition_, initial_dist_,
                      discount_);
}

SoftmaxPolicy::SoftmaxPolicy(Matrix logits) : logits_(std::move(logits)) {
    if (logits_.rows() < 1 || logits_.cols() < 1) {
        throw ValidationError("policy logits must be a non-empty S x A table");
    }
    if (!logits_.allFinite()) {
        throw ValidationError("policy logits must be finite");
    }
    // Row softmax with max subtraction; shift invariance makes this exact.
    probs_ = Matrix(logits_.rows(), logits_.cols());
    for (Eigen::Index s = 0; s < logits_.rows(); ++s) {
        const double m = logits_.row(s).maxCoeff();
        Eigen::RowVectorXd e = (logits_.row(s).array() - m).exp();
        probs_.row(s) = e / e.sum();
    }
}

Occupancy::Occupancy(int num_states, int num_actions, Vector weights)
    : num_states_(num_states), num_actions_(num_actions), weights_(std::move(weights)) {
    require(num_states_ > 0 && num_actions_ > 0, "occupancy dimensions must be positive");
    require(weights_.size() == static_cast<Eigen::Index>(num_states_) * num_actions_,
            "occupancy weights must have length S*A");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        require(std::isfinite(weights_[i]), "occupancy weights must be finite");
        require(weights_[i] >= -kProbabilityTolerance, "occupancy weights must be nonnegative");
        if (weights_[i] < 0.0) weights_[i] = 0.0;
    }
}

Vector Occupancy::state_marginal() const {
    Vector marginal = Vector::Zero(num_states_);
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions_; ++a) {
            marginal[s] += weights_[pair_index(s, a, num_actions_)];
        }
    }
    return marginal;
}

Matrix Occupancy::table() const {
    Matrix t(num_states_, num_actions_);
    for (int s = 0; s < num_states_; ++s)
        for (int a = 0; a < num_actions_; ++a) t(s, a) = (*this)(s, a);
    return t;
}

ValueTable::ValueTable(int num_states, int num_actions, Vector values)
    : num_states_(num_states), num_actions_(num_actions), values_(std::move(values)) {
    require(num_states_ > 0 && num_actions_ > 0, "value table dimensions must be positive");
    require(values_.size() == static_cast<Eigen::Index>(num_states_) * num_actions_,
            "value table must have length S*A");
    require(values_.allFinite(), "value table entries must be finite");
}

ValueTable ValueTable::from_table(const Matrix& table) {
    const int S = static_cast<int>(table.rows());
    const int A = static_cast<int>(table.cols());
    Vector flat(S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) flat[pair_index(s, a, A)] = table(s, a);
    return ValueTable(S, A, std::move(flat));
}

Matrix ValueTable::table() const {
    Matrix t(num_states_, num_actions_);
    for (int s = 0; s < num_states_; ++s)
        for (int a = 0; a < num_actions_; ++a) t(s, a) = (*this)(s, a);
    return t;
}

} // namespace algae
