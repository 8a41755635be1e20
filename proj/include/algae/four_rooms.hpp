#pragma once

#include <optional>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "algae/mdp.hpp"
#include "algae/solver.hpp"

namespace algae {

inline constexpr int kFourRoomsSize = 11;

/// Where trajectories begin: the designated start cell, or uniform over all
/// open cells (the dataset-collection initialization).
enum class InitialStates { kStart, kUniform };

struct FourRoomsOptions {
    double slip = 0.0;
    bool goal_reset = true;
    InitialStates initial = InitialStates::kUniform;
    double discount = 0.99;
};

/// The classic 11x11 four-rooms gridworld: walls along row 5 and column 5
/// with four doorways, actions {up, down, left, right}, moves into walls
/// stay in place, and reward 1 on transitions that enter the goal cell.
/// With goal_reset the goal teleports back to the start cell (continuing
/// task); without it the goal is absorbing and keeps rewarding.
class FourRooms {
public:
    explicit FourRooms(FourRoomsOptions options = {});

    const TabularMdp& mdp() const { return *mdp_; }
    const FourRoomsOptions& options() const { return options_; }

    int num_open_cells() const { return static_cast<int>(state_to_cell_.size()); }
    bool is_wall(int row, int col) const;

    int state_of_cell(int row, int col) const;           // -1 for walls
    std::pair<int, int> cell_of_state(int state) const;  // (row, col)

    int start_state() const { return start_state_; }
    int goal_state() const { return goal_state_; }

    int manhattan_from_start(int state) const;

    /// Expands a per-state vector into an 11x11 grid; wall cells read 0.
    Matrix to_grid(const Vector& per_state) const;

    static const std::array<std::string, 4>& action_names();

private:
    FourRoomsOptions options_;
    std::vector<int> state_to_cell_;
    std::array<int, kFourRoomsSize * kFourRoomsSize> cell_to_state_;
    int start_state_ = 0;
    int goal_state_ = 0;
    std::optional<TabularMdp> mdp_;
};

/// Fixed stochastic behavior policy for gridworld data collection: uniform
/// plus a mild bias toward actions that reduce the distance to the goal
/// corner. bias = 0 gives the uniform policy.
SoftmaxPolicy gridwalk_behavior(const FourRooms& env, double bias = 0.2);

/// Per-state dual-variable diagnostic m(s) = sum_a f*'((B_pi nu - nu)(s,a)/alpha):
/// at the inner optimum this aggregates the density-ratio estimates.
Vector residual_state_values(const TabularMdp& mdp, const SoftmaxPolicy& pi,
                             const ValueTable& nu, const AlgaeConfig& cfg);

/// One snapshot of the per-state residual diagnostic on the grid.
struct ResidualMap {
    int step = 0;
    Matrix grid;  // 11 x 11, zeros on walls
};

ResidualMap residual_map(const FourRooms& env, const SoftmaxPolicy& pi, const ValueTable& nu,
                         const AlgaeConfig& cfg, int step = 0);

} // namespace algae
