#include "algae/four_rooms.hpp"

#include <cmath>

#include "algae/errors.hpp"
#include "algae/mdp_core.hpp"

namespace algae {

namespace {

constexpr int kSize = kFourRoomsSize;

// Walls along row 5 and column 5; doorways at the four canonical openings.
bool layout_wall(int row, int col) {
    const bool doorway = (row == 5 && (col == 2 || col == 8)) ||
                         (col == 5 && (row == 2 || row == 8));
    return (row == 5 || col == 5) && !doorway;
}

constexpr int kStartRow = 0, kStartCol = 0;
constexpr int kGoalRow = 10, kGoalCol = 10;

// up, down, left, right
constexpr int kRowDelta[4] = {-1, 1, 0, 0};
constexpr int kColDelta[4] = {0, 0, -1, 1};

} // namespace

const std::array<std::string, 4>& FourRooms::action_names() {
    static const std::array<std::string, 4> names{"up", "down", "left", "right"};
    return names;
}

FourRooms::FourRooms(FourRoomsOptions options) : options_(options) {
    if (options_.slip < 0.0 || options_.slip > 1.0) {
        throw ValidationError("slip probability must lie in [0, 1]");
    }
    cell_to_state_.fill(-1);
    for (int row = 0; row < kSize; ++row) {
        for (int col = 0; col < kSize; ++col) {
            if (layout_wall(row, col)) continue;
            cell_to_state_[row * kSize + col] = static_cast<int>(state_to_cell_.size());
            state_to_cell_.push_back(row * kSize + col);
        }
    }
    start_state_ = state_of_cell(kStartRow, kStartCol);
    goal_state_ = state_of_cell(kGoalRow, kGoalCol);

    const int S = num_open_cells();
    const int A = 4;

    // Deterministic move targets; bumping a wall or the border stays put.
    std::vector<std::array<int, 4>> move(S);
    for (int s = 0; s < S; ++s) {
        const auto [row, col] = cell_of_state(s);
        for (int a = 0; a < A; ++a) {
            const int nr = row + kRowDelta[a];
            const int nc = col + kColDelta[a];
            const bool blocked =
                nr < 0 || nr >= kSize || nc < 0 || nc >= kSize || layout_wall(nr, nc);
            move[s][a] = blocked ? s : state_of_cell(nr, nc);
        }
    }

    Matrix reward = Matrix::Zero(S, A);
    Matrix transition = Matrix::Zero(S * A, S);
    const double slip = options_.slip;
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const int idx = pair_index(s, a, A);
            if (s == goal_state_) {
                if (options_.goal_reset) {
                    transition(idx, start_state_) = 1.0;
                } else {
                    transition(idx, goal_state_) = 1.0;
                    reward(s, a) = 1.0;
                }
                continue;
            }
            // Executed action is the chosen one with probability 1 - slip,
            // otherwise uniform over all four.
            for (int b = 0; b < A; ++b) {
                double p = (b == a ? 1.0 - slip : 0.0) + slip / A;
                if (p <= 0.0) continue;
                transition(idx, move[s][b]) += p;
                if (move[s][b] == goal_state_) reward(s, a) += p;
            }
        }
    }

    Vector initial = Vector::Zero(S);
    if (options_.initial == InitialStates::kStart) {
        initial[start_state_] = 1.0;
    } else {
        initial.setConstant(1.0 / S);
    }

    mdp_.emplace(S, A, reward, transition, initial, options_.discount);
}

bool FourRooms::is_wall(int row, int col) const { return layout_wall(row, col); }

int FourRooms::state_of_cell(int row, int col) const {
    if (row < 0 || row >= kSize || col < 0 || col >= kSize) return -1;
    return cell_to_state_[row * kSize + col];
}

std::pair<int, int> FourRooms::cell_of_state(int state) const {
    const int cell = state_to_cell_.at(state);
    return {cell / kSize, cell % kSize};
}

int FourRooms::manhattan_from_start(int state) const {
    const auto [row, col] = cell_of_state(state);
    return std::abs(row - kStartRow) + std::abs(col - kStartCol);
}

Matrix FourRooms::to_grid(const Vector& per_state) const {
    Matrix grid = Matrix::Zero(kSize, kSize);
    for (int s = 0; s < num_open_cells(); ++s) {
        const auto [row, col] = cell_of_state(s);
        grid(row, col) = per_state[s];
    }
    return grid;
}

SoftmaxPolicy gridwalk_behavior(const FourRooms& env, double bias) {
    if (bias < 0.0 || bias >= 1.0) {
        throw ValidationError("behavior bias must lie in [0, 1)");
    }
    const int S = env.num_open_cells();
    const int A = 4;
    const auto [goal_row, goal_col] = env.cell_of_state(env.goal_state());
    Matrix logits(S, A);
    for (int s = 0; s < S; ++s) {
        const auto [row, col] = env.cell_of_state(s);
        std::array<bool, 4> toward{};
        int count = 0;
        for (int a = 0; a < A; ++a) {
            const int nr = row + kRowDelta[a];
            const int nc = col + kColDelta[a];
            const int before = std::abs(row - goal_row) + std::abs(col - goal_col);
            const int after = std::abs(nr - goal_row) + std::abs(nc - goal_col);
            toward[a] = after < before;
            if (toward[a]) ++count;
        }
        for (int a = 0; a < A; ++a) {
            double weight = (1.0 - bias) / A;
            if (count > 0 && toward[a]) weight += bias / count;
            logits(s, a) = std::log(weight > 0.0 ? weight : 1.0 / A);
        }
    }
    return SoftmaxPolicy(logits);
}

Vector residual_state_values(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                             const ValueTable& nu, const AlgaeConfig& cfg) {
    if (cfg.alpha == 0.0) throw ConfigError("residual diagnostic requires alpha != 0");
    const ValueTable backed = bellman(mdp, pi, nu);
    Vector per_state = Vector::Zero(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            per_state[s] += cfg.divergence.f_star_prime((backed(s, a) - nu(s, a)) / cfg.alpha);
        }
    }
    return per_state;
}

ResidualMap residual_map(const FourRooms& env, const SoftmaxPolicy& pi, const ValueTable& nu,
                         const AlgaeConfig& cfg, int step) {
    ResidualMap map;
    map.step = step;
    map.grid = env.to_grid(residual_state_values(env.mdp(), pi, nu, cfg));
    return map;
}

} // namespace algae
