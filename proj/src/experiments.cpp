#include "algae/experiments.hpp"

#include <cmath>
#include <future>

#include "algae/errors.hpp"
#include "algae/mdp_core.hpp"
#include "algae/rng.hpp"

namespace algae {

ExperimentPreset preset(const std::string& name) {
    ExperimentPreset p;
    p.name = name;
    if (name == "fig1") {
        p.num_trajectories = 500;
        p.trajectory_length = 10;
        p.discount = 0.97;
        p.behavior = "uniform";
        return p;
    }
    if (name == "fig2") {
        p.num_trajectories = 100;
        p.trajectory_length = 100;
        p.discount = 0.99;
        p.behavior = "gridwalk";
        return p;
    }
    throw ValidationError("unknown preset '" + name + "'; expected fig1 or fig2");
}

std::string to_string(Method method) {
    return method == Method::kAlgae ? "algae" : "ac";
}

std::string to_string(Mode mode) { return mode == Mode::kOnline ? "online" : "offline"; }

Method method_from_string(const std::string& name) {
    if (name == "algae") return Method::kAlgae;
    if (name == "ac") return Method::kActorCritic;
    throw ValidationError("unknown method '" + name + "'; expected algae or ac");
}

Mode mode_from_string(const std::string& name) {
    if (name == "online") return Mode::kOnline;
    if (name == "offline") return Mode::kOffline;
    throw ValidationError("unknown mode '" + name + "'; expected online or offline");
}

SoftmaxPolicy behavior_policy(const FourRooms& env, const ExperimentPreset& preset) {
    if (preset.behavior == "uniform") {
        return SoftmaxPolicy::uniform(env.mdp().num_states(), env.mdp().num_actions());
    }
    if (preset.behavior == "gridwalk") return gridwalk_behavior(env);
    throw ValidationError("unknown behavior '" + preset.behavior + "'");
}

namespace {

FourRooms environment_for(const ExperimentPreset& preset) {
    FourRoomsOptions options;
    options.slip = preset.slip;
    options.goal_reset = preset.goal_reset;
    options.initial = preset.initial;
    options.discount = preset.discount;
    return FourRooms(options);
}

std::uint64_t step_seed(std::uint64_t master, int step) {
    RandomStream derive(master, 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(step));
    return derive.bits();
}

} // namespace

ExperimentRun run_experiment_on(const FourRooms& env, const ExperimentPreset& preset,
                                Method method, Mode mode, std::uint64_t seed) {
    const TabularMdp& mdp = env.mdp();
    const int S = mdp.num_states();
    const int A = mdp.num_actions();

    OccupancyProvider provider;
    if (mode == Mode::kOffline) {
        const SoftmaxPolicy behavior = behavior_policy(env, preset);
        const ExperienceSet data =
            collect(mdp, behavior, preset.num_trajectories, preset.trajectory_length, seed);
        const Occupancy d_D = empirical_distribution(data, S, A, preset.smoothing);
        provider = [d_D](const SoftmaxPolicy&, int) { return d_D; };
    } else {
        const ExperimentPreset p = preset;
        const TabularMdp* mdp_ptr = &mdp;
        provider = [p, mdp_ptr, seed](const SoftmaxPolicy& pi, int step) {
            const ExperienceSet data = collect(*mdp_ptr, pi, p.num_trajectories,
                                               p.trajectory_length, step_seed(seed, step));
            return empirical_distribution(data, mdp_ptr->num_states(), mdp_ptr->num_actions(),
                                          p.smoothing);
        };
    }

    ExperimentRun run{TrainResult{SoftmaxPolicy::uniform(S, A), {}}, 0.0};
    if (method == Method::kAlgae) {
        AlgaeConfig cfg;
        cfg.alpha = preset.alpha;
        cfg.divergence = divergence_from_name(preset.divergence);
        run.result = train(mdp, provider, cfg, preset.steps, preset.algae_learning_rate);
    } else {
        run.result = train_actor_critic(mdp, provider, preset.steps, preset.ac_learning_rate);
    }
    run.final_reward = run.result.metrics.back().dual_return;
    return run;
}

ExperimentRun run_experiment(const ExperimentPreset& preset, Method method, Mode mode,
                             std::uint64_t seed) {
    const FourRooms env = environment_for(preset);
    return run_experiment_on(env, preset, method, mode, seed);
}

std::vector<ComparisonCell> compare(const ExperimentPreset& preset,
                                    const std::vector<std::uint64_t>& seeds) {
    struct Cell {
        Method method;
        Mode mode;
    };
    const Cell cells[4] = {{Method::kAlgae, Mode::kOnline},
                           {Method::kAlgae, Mode::kOffline},
                           {Method::kActorCritic, Mode::kOnline},
                           {Method::kActorCritic, Mode::kOffline}};

    std::vector<ComparisonCell> table;
    std::vector<std::vector<std::future<double>>> futures(4);
    for (int c = 0; c < 4; ++c) {
        for (std::uint64_t seed : seeds) {
            futures[c].push_back(std::async(std::launch::async, [&preset, cells, c, seed] {
                return run_experiment(preset, cells[c].method, cells[c].mode, seed).final_reward;
            }));
        }
    }
    for (int c = 0; c < 4; ++c) {
        ComparisonCell cell;
        cell.method = cells[c].method;
        cell.mode = cells[c].mode;
        for (auto& f : futures[c]) cell.final_rewards.push_back(f.get());
        double sum = 0.0;
        for (double v : cell.final_rewards) sum += v;
        cell.mean = sum / cell.final_rewards.size();
        double var = 0.0;
        for (double v : cell.final_rewards) var += (v - cell.mean) * (v - cell.mean);
        cell.stddev = cell.final_rewards.size() > 1
                          ? std::sqrt(var / (cell.final_rewards.size() - 1))
                          : 0.0;
        table.push_back(cell);
    }
    return table;
}

QualitativeRun run_qualitative(int steps, std::uint64_t seed) {
    // Training environment starts every episode at the start cell; the
    // near-uniform offline data comes from a uniform policy with uniform
    // resets on the same layout.
    ExperimentPreset p = preset("fig1");
    FourRoomsOptions train_options;
    train_options.slip = p.slip;
    train_options.goal_reset = p.goal_reset;
    train_options.initial = InitialStates::kStart;
    train_options.discount = p.discount;
    FourRooms env(train_options);

    FourRoomsOptions data_options = train_options;
    data_options.initial = InitialStates::kUniform;
    const FourRooms data_env(data_options);
    const SoftmaxPolicy behavior = behavior_policy(data_env, p);
    const ExperienceSet data = collect(data_env.mdp(), behavior, p.num_trajectories,
                                       p.trajectory_length, seed);
    const Occupancy d_D = empirical_distribution(data, env.mdp().num_states(),
                                                 env.mdp().num_actions(), p.smoothing);

    AlgaeConfig cfg;
    cfg.alpha = p.alpha;
    cfg.divergence = divergence_from_name(p.divergence);

    QualitativeRun run{env, SoftmaxPolicy::uniform(env.mdp().num_states(),
                                                   env.mdp().num_actions())};
    SoftmaxPolicy pi = run.final_policy;
    for (int step = 0; step <= steps; ++step) {
        const AlgaeSolution solution = solve_nu(env.mdp(), pi, d_D, cfg);
        run.maps.push_back(residual_map(env, pi, solution.nu, cfg, step));
        if (step < steps) {
            const Matrix grad = policy_gradient_at(env.mdp(), pi, d_D, cfg, solution);
            pi = SoftmaxPolicy(pi.logits() + p.algae_learning_rate * grad);
        }
    }
    run.final_policy = pi;
    return run;
}

} // namespace algae
