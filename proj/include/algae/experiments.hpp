#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "algae/actor_critic.hpp"
#include "algae/dataset.hpp"
#include "algae/four_rooms.hpp"
#include "algae/solver.hpp"

namespace algae {

/// A fully pinned Four Rooms experiment configuration. The two named
/// presets are "fig1" (500 trajectories x length 10, gamma 0.97, uniform
/// behavior) and "fig2" (100 x 100, gamma 0.99, gridwalk behavior), both
/// with alpha 0.01 and quadratic regularization.
struct ExperimentPreset {
    std::string name;
    int num_trajectories = 0;
    int trajectory_length = 0;
    double discount = 0.99;
    double alpha = 0.01;
    std::string divergence = "quadratic";
    // Add-one smoothing: finite datasets miss some pairs entirely, and the
    // floor keeps the implied ratios (and their gradients) bounded.
    double smoothing = 1.0;
    int steps = 60;
    double algae_learning_rate = 30.0;
    double ac_learning_rate = 0.1;
    double slip = 0.0;
    // Presets use the absorbing goal: under it the logged data and improved
    // policies overlap at the goal, so density ratios stay bounded and the
    // regularizer stays a perturbation.
    bool goal_reset = false;
    InitialStates initial = InitialStates::kUniform;
    std::string behavior = "uniform";  // "uniform" | "gridwalk"
};

ExperimentPreset preset(const std::string& name);

enum class Method { kAlgae, kActorCritic };
enum class Mode { kOnline, kOffline };

std::string to_string(Method method);
std::string to_string(Mode mode);
Method method_from_string(const std::string& name);
Mode mode_from_string(const std::string& name);

/// Behavior policy named by the preset, built on the environment.
SoftmaxPolicy behavior_policy(const FourRooms& env, const ExperimentPreset& preset);

struct ExperimentRun {
    TrainResult result;
    double final_reward = 0.0;
};

/// Trains one (method, mode) cell of the comparison on Four Rooms.
/// Offline mode fixes one dataset drawn with the preset's behavior policy;
/// online mode re-collects with the current policy every step.
ExperimentRun run_experiment(const ExperimentPreset& preset, Method method, Mode mode,
                             std::uint64_t seed);

/// As run_experiment but on a caller-supplied environment/dataset.
ExperimentRun run_experiment_on(const FourRooms& env, const ExperimentPreset& preset,
                                Method method, Mode mode, std::uint64_t seed);

/// Mean/stddev of final rewards across seeds for one comparison cell.
struct ComparisonCell {
    Method method;
    Mode mode;
    std::vector<double> final_rewards;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Runs the 2x2 (method x mode) comparison over the given seeds; the cells
/// are computed in parallel, one task per (cell, seed).
std::vector<ComparisonCell> compare(const ExperimentPreset& preset,
                                    const std::vector<std::uint64_t>& seeds);

/// Residual-map training sequence on the qualitative setup: start-state
/// initial distribution, near-uniform offline data.
struct QualitativeRun {
    FourRooms env;
    std::vector<ResidualMap> maps;  // one per training step, step 0 first
    SoftmaxPolicy final_policy;

    QualitativeRun(FourRooms e, SoftmaxPolicy p) : env(std::move(e)), final_policy(std::move(p)) {}
};

QualitativeRun run_qualitative(int steps, std::uint64_t seed);

} // namespace algae
