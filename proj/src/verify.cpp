#include "algae/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "algae/actor_critic.hpp"
#include "algae/dataset.hpp"
#include "algae/divergence.hpp"
#include "algae/errors.hpp"
#include "algae/experiments.hpp"
#include "algae/four_rooms.hpp"
#include "algae/mdp_core.hpp"
#include "algae/random_mdp.hpp"
#include "algae/rng.hpp"
#include "algae/solver.hpp"

namespace algae {

namespace {

std::string worst(double value, double bound) {
    std::ostringstream out;
    out << "worst " << value << " (bound " << bound << ")";
    return out.str();
}

/// Central finite differences of a scalar function of the logits.
template <typename Fn>
Matrix finite_difference_gradient(const Fn& objective, const Matrix& logits, double h) {
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

PropertyResult check_strong_duality(int seeds) {
    double worst_gap = 0.0;
    for (int k = 0; k < seeds; ++k) {
        for (double gamma : {0.5, 0.9, 0.99}) {
            RandomStream stream(2024, 10 * k + static_cast<int>(100 * gamma));
            const TabularMdp mdp = random_mdp(stream, random_size(stream, 10, 4, gamma));
            const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
            worst_gap = std::max(worst_gap,
                                 std::abs(primal_return(mdp, pi) - dual_return(mdp, pi)));
        }
    }
    return {"mdp_core/strong_duality", worst_gap <= 1e-9, worst(worst_gap, 1e-9)};
}

PropertyResult check_fixed_points(int seeds) {
    double worst_q = 0.0, worst_d = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2025, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.9));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const ValueTable q = q_values(mdp, pi);
        worst_q = std::max(worst_q,
                           (bellman(mdp, pi, q).flat() - q.flat()).lpNorm<Eigen::Infinity>());
        const Occupancy d = visitation(mdp, pi);
        worst_d = std::max(
            worst_d, (transpose_bellman(mdp, pi, d).flat() - d.flat()).lpNorm<Eigen::Infinity>());
    }
    const bool pass = worst_q <= 1e-9 && worst_d <= 1e-9;
    return {"mdp_core/bellman_fixed_points", pass,
            "worst Q " + std::to_string(worst_q) + ", worst d " + std::to_string(worst_d)};
}

PropertyResult check_lp_feasibility(int seeds) {
    double worst_violation = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2026, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.8));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        Vector raw(mdp.num_pairs());
        for (int i = 0; i < mdp.num_pairs(); ++i) raw[i] = stream.uniform(-2.0, 2.0);
        // Lift until nu >= B_pi nu entrywise.
        ValueTable nu(mdp.num_states(), mdp.num_actions(), raw);
        const Vector residual = bellman(mdp, pi, nu).flat() - nu.flat();
        const double lift = std::max(0.0, residual.maxCoeff()) / (1.0 - mdp.discount());
        nu = ValueTable(mdp.num_states(), mdp.num_actions(), raw.array() + lift + 1e-12);
        const double objective =
            (1.0 - mdp.discount()) * initial_pair_distribution(mdp, pi).dot(nu.flat());
        worst_violation = std::max(worst_violation, primal_return(mdp, pi) - objective);
    }
    return {"mdp_core/lp_feasible_upper_bound", worst_violation <= 1e-9,
            worst(worst_violation, 1e-9)};
}

PropertyResult check_policy_gradient_fd(int seeds) {
    double worst_rel = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2027, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 5, 3, 0.8));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Matrix grad = on_policy_policy_gradient(mdp, pi);
        const Matrix fd = finite_difference_gradient(
            [&](const Matrix& logits) { return primal_return(mdp, SoftmaxPolicy(logits)); },
            pi.logits(), 1e-5);
        const double scale = std::max(1e-12, grad.lpNorm<Eigen::Infinity>());
        worst_rel = std::max(worst_rel, (grad - fd).lpNorm<Eigen::Infinity>() / scale);
    }
    return {"mdp_core/policy_gradient_vs_fd", worst_rel <= 1e-4, worst(worst_rel, 1e-4)};
}

PropertyResult check_divergence_grid(int) {
    double worst_err = 0.0;
    for (const double p : {0.0, 1.5, 2.0, 3.0, 4.0}) {
        const DivergencePair div = p == 0.0 ? quadratic() : polynomial(p);
        for (double x = -5.0; x <= 5.0 + 1e-9; x += 0.1) {
            // Inverse derivatives.
            worst_err = std::max(worst_err, std::abs(div.f_star_prime(div.f_prime(x)) - x));
            // Fenchel-Young with equality at y = f'(x).
            const double y_star = div.f_prime(x);
            worst_err =
                std::max(worst_err, std::abs(div.f(x) + div.f_star(y_star) - x * y_star));
            for (double y = -5.0; y <= 5.0 + 1e-9; y += 0.5) {
                const double slack = div.f(x) + div.f_star(y) - x * y;
                worst_err = std::max(worst_err, std::max(0.0, -slack - 1e-9));
            }
        }
        div.check_consistency();
    }
    return {"divergences/grid_checks", worst_err <= 1e-8, worst(worst_err, 1e-8)};
}

PropertyResult check_variational_form(int seeds) {
    double worst_err = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2028, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 6, 3, 0.8));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_pi = visitation(mdp, pi);
        const Occupancy d_D = visitation(mdp, mu);
        for (const DivergencePair& div : {quadratic(), polynomial(1.5)}) {
            const double divergence = f_divergence(d_pi, d_D, div);
            // Self-divergence pins f(1).
            worst_err = std::max(worst_err,
                                 std::abs(f_divergence(d_pi, d_pi, div) - div.f(1.0)));
            // Random duals never exceed the divergence.
            Vector x(mdp.num_pairs());
            for (int i = 0; i < mdp.num_pairs(); ++i) x[i] = stream.uniform(-2.0, 2.0);
            const double gap = variational_gap(
                d_pi, d_D, ValueTable(mdp.num_states(), mdp.num_actions(), x), div);
            worst_err = std::max(worst_err, gap - divergence);
            // The plug-in optimum attains it.
            const Matrix w = density_ratio(d_pi, d_D);
            Vector x_opt(mdp.num_pairs());
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a)
                    x_opt[pair_index(s, a, mdp.num_actions())] = div.f_prime(w(s, a));
            const double attained = variational_gap(
                d_pi, d_D, ValueTable(mdp.num_states(), mdp.num_actions(), x_opt), div);
            worst_err = std::max(worst_err, std::abs(attained - divergence));
        }
    }
    return {"divergences/variational_form", worst_err <= 1e-9, worst(worst_err, 1e-9)};
}

PropertyResult check_dataset_determinism(int seeds) {
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2029, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 6, 3, 0.9));
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const ExperienceSet a = collect(mdp, mu, 20, 5, 77 + k);
        const ExperienceSet b = collect(mdp, mu, 20, 5, 77 + k);
        if (!(a == b)) return {"dataset/determinism", false, "same seed produced different data"};
        const Occupancy d = empirical_distribution(a, mdp.num_states(), mdp.num_actions(), 0.0);
        const double n = static_cast<double>(a.transitions.size());
        for (int i = 0; i < mdp.num_pairs(); ++i) {
            const double scaled = d.flat()[i] * n;
            if (std::abs(scaled - std::round(scaled)) > 1e-9) {
                return {"dataset/determinism", false, "unsmoothed estimate is not count-exact"};
            }
        }
    }
    return {"dataset/determinism", true, "bit-identical across repeats; counts exact"};
}

PropertyResult check_dataset_consistency(int) {
    RandomStream stream(2030, 0);
    RandomMdpOptions options;
    options.num_states = 5;
    options.num_actions = 3;
    options.discount = 0.9;
    const TabularMdp mdp = random_mdp(stream, options);
    const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());

    // Fixed-horizon analytic occupancy of the behavior policy.
    const int horizon = 10;
    Vector beta = mdp.initial_dist();
    Vector analytic = Vector::Zero(mdp.num_pairs());
    for (int t = 0; t < horizon; ++t) {
        Vector rho(mdp.num_pairs());
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                rho[pair_index(s, a, mdp.num_actions())] = beta[s] * mu.prob(s, a);
        analytic += rho / horizon;
        beta = mdp.transition_matrix().transpose() * rho;
    }

    double previous = -1.0;
    bool monotone = true;
    std::ostringstream detail;
    for (int trajectories : {5, 500, 50000}) {
        const ExperienceSet data = collect(mdp, mu, trajectories, horizon, 123);
        const Occupancy d =
            empirical_distribution(data, mdp.num_states(), mdp.num_actions(), 0.0);
        const double l1 = (d.flat() - analytic).lpNorm<1>();
        detail << trajectories << ":" << l1 << " ";
        if (previous >= 0.0 && l1 >= previous) monotone = false;
        previous = l1;
    }
    return {"dataset/estimate_converges", monotone, detail.str()};
}

PropertyResult check_theorem4(int seeds) {
    double worst_residual = 0.0, worst_zeta = 0.0, worst_value = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2031, k);
        const double gamma = k % 2 == 0 ? 0.5 : 0.9;
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 10, 4, gamma));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        const Matrix w = density_ratio(visitation(mdp, pi), d_D);
        for (double alpha : {0.01, 1.0}) {
            AlgaeConfig cfg;
            cfg.alpha = alpha;
            const AlgaeSolution sol = solve_nu_quadratic(mdp, pi, d_D, alpha);
            // nu* = -alpha f'(zeta*) + B_pi nu*, checked through the operator path.
            const ValueTable backed = bellman(mdp, pi, sol.nu);
            double residual = 0.0;
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a)
                    residual = std::max(
                        residual, std::abs(sol.nu(s, a) + alpha * cfg.divergence.f_prime(sol.zeta(s, a)) -
                                           backed(s, a)));
            worst_residual = std::max(worst_residual, residual);
            worst_zeta = std::max(worst_zeta, (sol.zeta - w).lpNorm<Eigen::Infinity>());
            const double expected =
                dual_return(mdp, pi) - alpha * f_divergence(visitation(mdp, pi), d_D, cfg.divergence);
            worst_value = std::max(worst_value, std::abs(sol.objective - expected));
        }
    }
    const bool pass = worst_residual <= 1e-7 && worst_zeta <= 1e-6 && worst_value <= 1e-7;
    std::ostringstream detail;
    detail << "residual " << worst_residual << ", zeta " << worst_zeta << ", value "
           << worst_value;
    return {"algae/optimum_identities", pass, detail.str()};
}

PropertyResult check_change_of_variables(int seeds) {
    double worst_gap = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2032, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.8));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_pi = visitation(mdp, pi);
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        AlgaeConfig cfg;
        cfg.alpha = 0.3;
        Vector nu_raw(mdp.num_pairs());
        for (int i = 0; i < mdp.num_pairs(); ++i) nu_raw[i] = stream.uniform(-1.0, 1.0);
        const ValueTable nu(mdp.num_states(), mdp.num_actions(), nu_raw);
        // Variational objective at x = (B nu - nu)/alpha ...
        const Vector e = bellman(mdp, pi, nu).flat() - nu.flat();
        double value_x = 0.0;
        for (int i = 0; i < mdp.num_pairs(); ++i) {
            value_x += d_pi.flat()[i] * (mdp.reward_flat()[i] - e[i]) +
                       cfg.alpha * d_D.flat()[i] * cfg.divergence.f_star(e[i] / cfg.alpha);
        }
        // ... telescopes into the off-policy objective at nu.
        const double value_nu = primal_objective(mdp, pi, d_D, nu, cfg);
        worst_gap = std::max(worst_gap, std::abs(value_x - value_nu));
    }
    return {"algae/change_of_variables", worst_gap <= 1e-9, worst(worst_gap, 1e-9)};
}

PropertyResult check_gradient_equivalence(int seeds) {
    double worst_abs = 0.0, worst_rel = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2033, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 5, 3, 0.8));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        AlgaeConfig cfg;
        cfg.alpha = 0.1;

        const Matrix grad = policy_gradient(mdp, pi, d_D, cfg);

        // Augmented-reward route.
        const Matrix w = density_ratio(visitation(mdp, pi), d_D);
        Matrix augmented(mdp.num_states(), mdp.num_actions());
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                augmented(s, a) = mdp.reward(s, a) - cfg.alpha * cfg.divergence.f_prime(w(s, a));
        const Matrix reference =
            on_policy_policy_gradient(mdp, pi, ValueTable::from_table(augmented));
        worst_abs = std::max(worst_abs, (grad - reference).lpNorm<Eigen::Infinity>());

        // Finite differences of the re-solved objective.
        const Matrix fd = finite_difference_gradient(
            [&](const Matrix& logits) {
                const SoftmaxPolicy perturbed(logits);
                return solve_nu(mdp, perturbed, d_D, cfg).objective;
            },
            pi.logits(), 1e-5);
        const double scale = std::max(1e-12, grad.lpNorm<Eigen::Infinity>());
        worst_rel = std::max(worst_rel, (grad - fd).lpNorm<Eigen::Infinity>() / scale);
    }
    const bool pass = worst_abs <= 1e-6 && worst_rel <= 1e-4;
    return {"algae/gradient_equivalence", pass,
            "vs augmented reward " + std::to_string(worst_abs) + ", vs fd " +
                std::to_string(worst_rel)};
}

PropertyResult check_inner_strong_duality(int seeds) {
    double worst_gap = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2034, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.9));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        AlgaeConfig cfg;
        cfg.alpha = 0.5;
        // min over nu of the analytic inner max.
        const double min_max = solve_nu_quadratic(mdp, pi, d_D, cfg.alpha).objective;
        // max over zeta of the inner min: at the exact ratio the nu terms
        // cancel, so the Lagrangian is constant in nu. Evaluate at several.
        const Matrix w = density_ratio(visitation(mdp, pi), d_D);
        for (int trial = 0; trial < 3; ++trial) {
            Vector nu_raw(mdp.num_pairs());
            for (int i = 0; i < mdp.num_pairs(); ++i) nu_raw[i] = stream.uniform(-3.0, 3.0);
            const double max_min = lagrangian_objective(
                mdp, pi, d_D, ValueTable(mdp.num_states(), mdp.num_actions(), nu_raw), w, cfg);
            worst_gap = std::max(worst_gap, std::abs(max_min - min_max));
        }
    }
    return {"algae/inner_strong_duality", worst_gap <= 1e-7, worst(worst_gap, 1e-7)};
}

PropertyResult check_optimum_shape(int seeds) {
    double worst_negative = 0.0;
    bool monotone = true;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2035, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.9));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        double previous = std::numeric_limits<double>::infinity();
        for (double alpha : {0.01, 0.1, 1.0}) {
            const AlgaeSolution sol = solve_nu_quadratic(mdp, pi, d_D, alpha);
            worst_negative = std::min(worst_negative, sol.zeta.minCoeff());
            if (sol.objective > previous + 1e-12) monotone = false;
            previous = sol.objective;
        }
    }
    const bool pass = worst_negative >= -1e-8 && monotone;
    return {"algae/optimum_shape", pass,
            "min zeta " + std::to_string(worst_negative) +
                (monotone ? ", value monotone in alpha" : ", value NOT monotone")};
}

PropertyResult check_undiscounted(int seeds) {
    double worst_zeta = 0.0, worst_value = 0.0, worst_lambda = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2036, k);
        RandomMdpOptions options = random_size(stream, 6, 3, 1.0);
        const TabularMdp mdp = random_mdp(stream, options);
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_pi = stationary_distribution(mdp, pi);
        const Occupancy d_D = stationary_distribution(mdp, mu);
        AlgaeConfig cfg;
        cfg.alpha = 0.2;
        cfg.gamma_one_mode = true;
        const AlgaeSolution sol = undiscounted_solve(mdp, pi, d_D, cfg);
        const Matrix w = density_ratio(d_pi, d_D);
        worst_zeta = std::max(worst_zeta, (sol.zeta - w).lpNorm<Eigen::Infinity>());
        const double reward = d_pi.flat().dot(mdp.reward_flat());
        const double expected_value = reward - cfg.alpha * f_divergence(d_pi, d_D, cfg.divergence);
        worst_value = std::max(worst_value, std::abs(sol.objective - expected_value));
        double mean_x = 0.0;
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                mean_x += d_pi(s, a) * cfg.divergence.f_prime(w(s, a));
        worst_lambda = std::max(worst_lambda, std::abs(sol.lambda - (reward - cfg.alpha * mean_x)));
    }
    const bool pass = worst_zeta <= 1e-6 && worst_value <= 1e-6 && worst_lambda <= 1e-6;
    std::ostringstream detail;
    detail << "zeta " << worst_zeta << ", value " << worst_value << ", lambda " << worst_lambda;
    return {"algae/undiscounted_identities", pass, detail.str()};
}

PropertyResult check_ope(int seeds) {
    double worst_small_alpha = 0.0, worst_self = 0.0;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2037, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 8, 4, 0.9));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        AlgaeConfig cfg;
        cfg.alpha = 1e-6;
        worst_small_alpha = std::max(
            worst_small_alpha, std::abs(ope_estimate(mdp, pi, d_D, cfg) - dual_return(mdp, pi)));
        // Self-evaluation: the ratio is one on the support.
        const Occupancy d_self = exact_behavior_distribution(mdp, pi);
        for (double alpha : {0.1, 1.0}) {
            AlgaeConfig self_cfg;
            self_cfg.alpha = alpha;
            const double expected =
                d_self.flat().dot(mdp.reward_flat()) - alpha * self_cfg.divergence.f(1.0);
            worst_self = std::max(
                worst_self, std::abs(ope_estimate(mdp, pi, d_self, self_cfg) - expected));
        }
    }
    const bool pass = worst_small_alpha <= 1e-4 && worst_self <= 1e-6;
    return {"algae/ope_sanity", pass,
            "alpha->0 " + std::to_string(worst_small_alpha) + ", self " +
                std::to_string(worst_self)};
}

PropertyResult check_actor_critic(int seeds) {
    double worst_fd = 0.0;
    bool improves = true;
    for (int k = 0; k < seeds; ++k) {
        RandomStream stream(2038, k);
        const TabularMdp mdp = random_mdp(stream, random_size(stream, 6, 3, 0.9));
        const SoftmaxPolicy pi = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const SoftmaxPolicy mu = random_policy(stream, mdp.num_states(), mdp.num_actions());
        const Occupancy d_D = exact_behavior_distribution(mdp, mu);
        const ValueTable q = q_values(mdp, pi);
        const Vector marginal = d_D.state_marginal();
        const auto surrogate = [&](const Matrix& logits) {
            const SoftmaxPolicy candidate(logits);
            double value = 0.0;
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a)
                    value += marginal[s] * candidate.prob(s, a) * q(s, a);
            return value;
        };
        const Matrix grad = actor_critic_gradient(mdp, pi, d_D);
        const Matrix fd = finite_difference_gradient(surrogate, pi.logits(), 1e-6);
        worst_fd = std::max(worst_fd, (grad - fd).lpNorm<Eigen::Infinity>());
        const SoftmaxPolicy stepped = actor_critic_step(mdp, pi, d_D, 0.5);
        if (surrogate(stepped.logits()) < surrogate(pi.logits())) improves = false;
    }
    const bool pass = worst_fd <= 1e-9 && improves;
    return {"baselines/semi_gradient", pass,
            "fd gap " + std::to_string(worst_fd) + (improves ? ", ascent ok" : ", ascent FAILED")};
}

PropertyResult check_four_rooms(int) {
    const FourRooms env{};
    const TabularMdp& mdp = env.mdp();
    // Connectivity: every open cell reaches the goal in the move graph.
    const int S = mdp.num_states();
    std::vector<bool> reaches(S, false);
    std::deque<int> queue{env.goal_state()};
    reaches[env.goal_state()] = true;
    // Walk the transition support backwards.
    while (!queue.empty()) {
        const int target = queue.front();
        queue.pop_front();
        for (int s = 0; s < S; ++s) {
            if (reaches[s]) continue;
            for (int a = 0; a < mdp.num_actions(); ++a) {
                if (mdp.transition(s, a, target) > 0.0) {
                    reaches[s] = true;
                    queue.push_back(s);
                    break;
                }
            }
        }
    }
    const bool connected = std::all_of(reaches.begin(), reaches.end(), [](bool b) { return b; });

    // Rewarded pairs match the layout's goal adjacency.
    int rewarded = 0;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (mdp.reward(s, a) > 0.0) ++rewarded;

    // Gridwalk behavior covers every open cell.
    const SoftmaxPolicy behavior = gridwalk_behavior(env);
    const Occupancy d =
        exact_behavior_distribution(env.mdp().with_discount(0.99), behavior);
    const double min_state_mass = d.state_marginal().minCoeff();

    const bool pass = connected && rewarded == 2 && min_state_mass > 0.0;
    std::ostringstream detail;
    detail << (connected ? "connected" : "DISCONNECTED") << ", rewarded pairs " << rewarded
           << ", min state mass " << min_state_mass;
    return {"four_rooms/layout", pass, detail.str()};
}

} // namespace

std::vector<PropertyResult> run_verification(int seeds) {
    if (seeds < 1) throw ValidationError("verification requires at least one seed");
    std::vector<PropertyResult> results;
    results.push_back(check_strong_duality(seeds));
    results.push_back(check_fixed_points(seeds));
    results.push_back(check_lp_feasibility(seeds));
    results.push_back(check_policy_gradient_fd(seeds));
    results.push_back(check_divergence_grid(seeds));
    results.push_back(check_variational_form(seeds));
    results.push_back(check_dataset_determinism(seeds));
    results.push_back(check_dataset_consistency(seeds));
    results.push_back(check_theorem4(seeds));
    results.push_back(check_change_of_variables(seeds));
    results.push_back(check_gradient_equivalence(seeds));
    results.push_back(check_inner_strong_duality(seeds));
    results.push_back(check_optimum_shape(seeds));
    results.push_back(check_undiscounted(seeds));
    results.push_back(check_ope(seeds));
    results.push_back(check_actor_critic(seeds));
    results.push_back(check_four_rooms(seeds));
    return results;
}

bool all_passed(const std::vector<PropertyResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const PropertyResult& r) { return r.pass; });
}

} // namespace algae
