#pragma once

#include <Eigen/Dense>

#include "algae/mdp.hpp"
#include "algae/mdp_core.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"

namespace algae::test {

/// One-state one-action MDP with reward 1; the geometric-series fixture.
inline TabularMdp one_state_mdp(double discount = 0.5, double reward = 1.0) {
    Matrix r(1, 1);
    r << reward;
    Matrix t(1, 1);
    t << 1.0;
    Vector mu0(1);
    mu0 << 1.0;
    return TabularMdp(1, 1, r, t, mu0, discount);
}

inline SoftmaxPolicy one_state_policy() { return SoftmaxPolicy::uniform(1, 1); }

/// Deterministic two-state cycle (0 -> 1 -> 0) with one action.
inline TabularMdp two_state_cycle(double discount = 0.9) {
    Matrix r = Matrix::Zero(2, 1);
    Matrix t(2, 2);
    t << 0.0, 1.0,
         1.0, 0.0;
    Vector mu0(2);
    mu0 << 1.0, 0.0;
    return TabularMdp(2, 1, r, t, mu0, discount);
}

/// Central finite differences of a scalar function of policy logits.
template <typename Fn>
Matrix fd_gradient(const Fn& objective, const Matrix& logits, double h = 1e-5) {
    Matrix grad(logits.rows(), logits.cols());
    for (Eigen::Index s = 0; s < logits.rows(); ++s) {
        for (Eigen::Index a = 0; a < logits.cols(); ++a) {
            Matrix plus = logits, minus = logits;
            plus(s, a) += h;
            minus(s, a) -= h;
            grad(s, a) = (objective(plus) - objective(minus)) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace algae::test
