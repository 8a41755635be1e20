#include "algae/mdp_core.hpp"

#include <algorithm>
#include <stack>
#include <vector>

#include "algae/errors.hpp"
#include "algae/linalg.hpp"

namespace algae {

namespace {

void check_dims(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    if (pi.num_states() != mdp.num_states() || pi.num_actions() != mdp.num_actions()) {
        throw ValidationError("policy dimensions do not match the MDP");
    }
}

void require_discounted(const TabularMdp& mdp, const char* op) {
    if (mdp.discount() >= 1.0) {
        throw ValidationError(std::string(op) +
                              " requires discount < 1; use stationary_distribution for the "
                              "undiscounted chain");
    }
}

/// Per-state expectation of a pair table under pi: out(s) = sum_a pi(a|s) v(s,a).
Vector policy_average(const SoftmaxPolicy& pi, const Vector& pair_values) {
    const int S = pi.num_states();
    const int A = pi.num_actions();
    Vector out = Vector::Zero(S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) out[s] += pi.prob(s, a) * pair_values[pair_index(s, a, A)];
    return out;
}

} // namespace

Matrix policy_transition_matrix(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const int n = S * A;
    Matrix P(n, n);
    for (int idx = 0; idx < n; ++idx) {
        for (int s_next = 0; s_next < S; ++s_next) {
            const double t = mdp.transition_matrix()(idx, s_next);
            for (int a_next = 0; a_next < A; ++a_next) {
                P(idx, pair_index(s_next, a_next, A)) = t * pi.prob(s_next, a_next);
            }
        }
    }
    return P;
}

ValueTable bellman(const TabularMdp& mdp, const SoftmaxPolicy& pi, const ValueTable& nu) {
    check_dims(mdp, pi);
    const Vector next_value = policy_average(pi, nu.flat());  // length S
    Vector out = mdp.reward_flat() + mdp.discount() * (mdp.transition_matrix() * next_value);
    return ValueTable(mdp.num_states(), mdp.num_actions(), std::move(out));
}

Occupancy transpose_bellman(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                            const Occupancy& rho) {
    check_dims(mdp, pi);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const double gamma = mdp.discount();
    const Vector inflow = mdp.transition_matrix().transpose() * rho.flat();  // length S
    Vector out(S * A);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            out[pair_index(s, a, A)] =
                gamma * pi.prob(s, a) * inflow[s] + (1.0 - gamma) * mdp.initial_dist()[s] * pi.prob(s, a);
        }
    }
    return Occupancy(S, A, std::move(out));
}

ValueTable q_values(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    require_discounted(mdp, "q_values");
    const int n = mdp.num_pairs();
    const Matrix system = Matrix::Identity(n, n) - mdp.discount() * policy_transition_matrix(mdp, pi);
    Vector q = solve_checked(system, mdp.reward_flat());
    return ValueTable(mdp.num_states(), mdp.num_actions(), std::move(q));
}

Occupancy visitation(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    require_discounted(mdp, "visitation");
    const int n = mdp.num_pairs();
    const Matrix system =
        Matrix::Identity(n, n) - mdp.discount() * policy_transition_matrix(mdp, pi).transpose();
    const Vector b = (1.0 - mdp.discount()) * initial_pair_distribution(mdp, pi);
    Vector d = solve_checked(system, b);
    const double most_negative = d.minCoeff();
    if (most_negative < -1e-9) {
        throw ConditioningError("visitation solve produced entry " + std::to_string(most_negative));
    }
    d = d.cwiseMax(0.0);
    d /= d.sum();
    return Occupancy(mdp.num_states(), mdp.num_actions(), std::move(d));
}

bool has_unique_recurrent_class(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const int n = S * A;

    // Support graph over pairs: (s,a) -> (s',a') iff T(s'|s,a) > 0 and pi(a'|s') > 0.
    std::vector<std::vector<int>> adj(n);
    for (int idx = 0; idx < n; ++idx) {
        for (int s_next = 0; s_next < S; ++s_next) {
            if (mdp.transition_matrix()(idx, s_next) <= 0.0) continue;
            for (int a_next = 0; a_next < A; ++a_next) {
                if (pi.prob(s_next, a_next) > 0.0) adj[idx].push_back(pair_index(s_next, a_next, A));
            }
        }
    }

    // Iterative Tarjan SCC.
    std::vector<int> index(n, -1), lowlink(n, 0), component(n, -1);
    std::vector<bool> on_stack(n, false);
    std::stack<int> scc_stack;
    int next_index = 0;
    int num_components = 0;

    struct Frame {
        int node;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::stack<Frame> call;
        call.push({root, 0});
        index[root] = lowlink[root] = next_index++;
        scc_stack.push(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& frame = call.top();
            if (frame.child < adj[frame.node].size()) {
                const int child = adj[frame.node][frame.child++];
                if (index[child] == -1) {
                    index[child] = lowlink[child] = next_index++;
                    scc_stack.push(child);
                    on_stack[child] = true;
                    call.push({child, 0});
                } else if (on_stack[child]) {
                    lowlink[frame.node] = std::min(lowlink[frame.node], index[child]);
                }
            } else {
                if (lowlink[frame.node] == index[frame.node]) {
                    while (true) {
                        const int w = scc_stack.top();
                        scc_stack.pop();
                        on_stack[w] = false;
                        component[w] = num_components;
                        if (w == frame.node) break;
                    }
                    ++num_components;
                }
                const int done = frame.node;
                call.pop();
                if (!call.empty()) {
                    lowlink[call.top().node] = std::min(lowlink[call.top().node], lowlink[done]);
                }
            }
        }
    }

    // A recurrent class is a component with no edge leaving it. Exactly one
    // such class means the chain is unichain and every pair reaches it.
    std::vector<bool> closed(num_components, true);
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            if (component[u] != component[v]) closed[component[u]] = false;
        }
    }
    return std::count(closed.begin(), closed.end(), true) == 1;
}

Occupancy stationary_distribution(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    if (!has_unique_recurrent_class(mdp, pi)) {
        throw ErgodicityError(
            "induced chain has no unique recurrent class; stationary distribution is not unique");
    }
    const int n = mdp.num_pairs();
    const Matrix P = policy_transition_matrix(mdp, pi);
    // Fixed-point equations (I - P^T) d = 0 stacked with the normalization row.
    Matrix system(n + 1, n);
    system.topRows(n) = Matrix::Identity(n, n) - P.transpose();
    system.row(n) = Eigen::RowVectorXd::Ones(n);
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;
    Vector d = solve_least_squares_checked(system, rhs);
    if (d.minCoeff() < -1e-9) {
        throw ConditioningError("stationary solve produced entry " +
                                std::to_string(d.minCoeff()));
    }
    d = d.cwiseMax(0.0);
    d /= d.sum();
    return Occupancy(mdp.num_states(), mdp.num_actions(), std::move(d));
}

Vector initial_pair_distribution(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    check_dims(mdp, pi);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    Vector b(S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            b[pair_index(s, a, A)] = mdp.initial_dist()[s] * pi.prob(s, a);
    return b;
}

double primal_return(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    require_discounted(mdp, "primal_return");
    const ValueTable q = q_values(mdp, pi);
    return (1.0 - mdp.discount()) * initial_pair_distribution(mdp, pi).dot(q.flat());
}

double dual_return(const TabularMdp& mdp, const SoftmaxPolicy& pi) {
    const Occupancy d =
        mdp.discount() < 1.0 ? visitation(mdp, pi) : stationary_distribution(mdp, pi);
    return d.flat().dot(mdp.reward_flat());
}

Matrix score_gradient(const SoftmaxPolicy& pi, const Vector& state_weight,
                      const ValueTable& values) {
    const int S = pi.num_states();
    const int A = pi.num_actions();
    Matrix grad(S, A);
    for (int s = 0; s < S; ++s) {
        double mean = 0.0;
        for (int a = 0; a < A; ++a) mean += pi.prob(s, a) * values(s, a);
        for (int b = 0; b < A; ++b) {
            grad(s, b) = state_weight[s] * pi.prob(s, b) * (values(s, b) - mean);
        }
    }
    return grad;
}

Matrix on_policy_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                                 const std::optional<ValueTable>& reward_override) {
    check_dims(mdp, pi);
    require_discounted(mdp, "on_policy_policy_gradient");
    const TabularMdp& effective =
        reward_override ? mdp.with_reward(reward_override->table()) : mdp;
    const ValueTable q = q_values(effective, pi);
    const Occupancy d = visitation(mdp, pi);

    // E_{d_pi}[Q(s,a) dlog pi(a|s)] expanded for softmax logits.
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    Matrix grad(S, A);
    for (int s = 0; s < S; ++s) {
        double weighted = 0.0;
        for (int a = 0; a < A; ++a) weighted += d(s, a) * q(s, a);
        for (int b = 0; b < A; ++b) {
            grad(s, b) = d(s, b) * q(s, b) - pi.prob(s, b) * weighted;
        }
    }
    return grad;
}

} // namespace algae
