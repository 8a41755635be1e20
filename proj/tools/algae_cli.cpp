// Command-line driver for the AlgaeDICE tabular experiments: dataset
// collection, training, off-policy evaluation, invariant verification,
// residual-map emission, and the online/offline comparison table.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "algae/actor_critic.hpp"
#include "algae/dataset.hpp"
#include "algae/errors.hpp"
#include "algae/experiments.hpp"
#include "algae/four_rooms.hpp"
#include "algae/mdp_core.hpp"
#include "algae/serialization.hpp"
#include "algae/solver.hpp"
#include "algae/verify.hpp"

namespace {

using nlohmann::json;

std::string format_double(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", x);
    return buffer;
}

/// Everything a training run needs, resolvable from flags or a config/
/// manifest JSON. Serialized verbatim into the run manifest.
struct TrainSpec {
    std::string method = "algae";
    std::string mode = "offline";
    std::string preset_name = "fig2";
    std::string divergence = "quadratic";
    double alpha = 0.01;
    double gamma = -1.0;  // -1: preset default
    int steps = -1;
    double learning_rate = -1.0;
    std::uint64_t seed = 0;
    double smoothing = algae::kDefaultSmoothing;
    std::string dataset_path;
    std::string out_dir = "runs/train";
};

json spec_to_json(const TrainSpec& spec, const algae::ExperimentPreset& resolved) {
    return json{{"command", "train"},
                {"method", spec.method},
                {"mode", spec.mode},
                {"preset", spec.preset_name},
                {"divergence", resolved.divergence},
                {"alpha", resolved.alpha},
                {"gamma", resolved.discount},
                {"steps", resolved.steps},
                {"learning_rate", spec.method == "ac" ? resolved.ac_learning_rate
                                                      : resolved.algae_learning_rate},
                {"seed", spec.seed},
                {"smoothing", resolved.smoothing},
                {"dataset_path", spec.dataset_path}};
}

void spec_from_json(const json& j, TrainSpec& spec) {
    const json& config = j.contains("config") ? j.at("config") : j;
    if (config.contains("method")) spec.method = config.at("method").get<std::string>();
    if (config.contains("mode")) spec.mode = config.at("mode").get<std::string>();
    if (config.contains("preset")) spec.preset_name = config.at("preset").get<std::string>();
    if (config.contains("divergence")) spec.divergence = config.at("divergence").get<std::string>();
    if (config.contains("alpha")) spec.alpha = config.at("alpha").get<double>();
    if (config.contains("gamma")) spec.gamma = config.at("gamma").get<double>();
    if (config.contains("steps")) spec.steps = config.at("steps").get<int>();
    if (config.contains("learning_rate")) spec.learning_rate = config.at("learning_rate").get<double>();
    if (config.contains("seed")) spec.seed = config.at("seed").get<std::uint64_t>();
    if (config.contains("smoothing")) spec.smoothing = config.at("smoothing").get<double>();
    if (config.contains("dataset_path") && config.at("dataset_path").is_string()) {
        spec.dataset_path = config.at("dataset_path").get<std::string>();
    }
}

algae::ExperimentPreset resolve_preset(const TrainSpec& spec) {
    algae::ExperimentPreset p = algae::preset(spec.preset_name);
    p.divergence = spec.divergence;
    p.alpha = spec.alpha;
    if (spec.gamma >= 0.0) p.discount = spec.gamma;
    if (spec.steps >= 0) p.steps = spec.steps;
    if (spec.learning_rate >= 0.0) {
        if (spec.method == "ac") {
            p.ac_learning_rate = spec.learning_rate;
        } else {
            p.algae_learning_rate = spec.learning_rate;
        }
    }
    p.smoothing = spec.smoothing;
    return p;
}

int cmd_collect(const std::string& preset_name, int trajectories, int length,
                std::uint64_t seed, const std::string& out_path) {
    algae::ExperimentPreset p = algae::preset(preset_name);
    if (trajectories > 0) p.num_trajectories = trajectories;
    if (length > 0) p.trajectory_length = length;
    algae::FourRoomsOptions options;
    options.discount = p.discount;
    options.initial = algae::InitialStates::kUniform;
    const algae::FourRooms env(options);
    const algae::SoftmaxPolicy behavior = algae::behavior_policy(env, p);
    const algae::ExperienceSet data = algae::collect(
        env.mdp(), behavior, p.num_trajectories, p.trajectory_length, seed);
    algae::save_experience_file(data, env.mdp().num_states(), env.mdp().num_actions(), out_path);

    const json manifest{{"command", "collect"},
                        {"config",
                         {{"preset", preset_name},
                          {"trajectories", p.num_trajectories},
                          {"length", p.trajectory_length},
                          {"behavior", p.behavior},
                          {"seed", seed}}},
                        {"outputs", {{out_path, algae::content_hash_file(out_path)}}}};
    algae::write_text_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << data.transitions.size() << " transitions to " << out_path << "\n";
    return 0;
}

int cmd_train(const TrainSpec& spec) {
    const algae::ExperimentPreset p = resolve_preset(spec);
    const algae::Method method = algae::method_from_string(spec.method);
    const algae::Mode mode = algae::mode_from_string(spec.mode);

    algae::FourRoomsOptions options;
    options.slip = p.slip;
    options.goal_reset = p.goal_reset;
    options.initial = p.initial;
    options.discount = p.discount;
    const algae::FourRooms env(options);
    const algae::TabularMdp& mdp = env.mdp();

    json input_hashes = json::object();
    algae::ExperimentRun run{algae::TrainResult{algae::SoftmaxPolicy::uniform(1, 1), {}}, 0.0};
    if (!spec.dataset_path.empty()) {
        if (mode != algae::Mode::kOffline) {
            throw algae::ValidationError("--dataset implies offline mode");
        }
        const algae::LoadedExperience loaded = algae::load_experience_file(spec.dataset_path);
        if (loaded.num_states != mdp.num_states() || loaded.num_actions != mdp.num_actions()) {
            throw algae::ValidationError("dataset dimensions do not match the environment");
        }
        input_hashes[spec.dataset_path] = algae::content_hash_file(spec.dataset_path);
        const algae::Occupancy d_D = algae::empirical_distribution(
            loaded.data, mdp.num_states(), mdp.num_actions(), p.smoothing);
        if (method == algae::Method::kAlgae) {
            algae::AlgaeConfig cfg;
            cfg.alpha = p.alpha;
            cfg.divergence = algae::divergence_from_name(p.divergence);
            run.result = algae::train(mdp, d_D, cfg, p.steps, p.algae_learning_rate);
        } else {
            run.result = algae::train_actor_critic(
                mdp, [&d_D](const algae::SoftmaxPolicy&, int) { return d_D; }, p.steps,
                p.ac_learning_rate);
        }
        run.final_reward = run.result.metrics.back().dual_return;
    } else {
        run = algae::run_experiment_on(env, p, method, mode, spec.seed);
    }

    std::filesystem::create_directories(spec.out_dir);
    const std::string metrics_path = spec.out_dir + "/metrics.csv";
    const std::string policy_path = spec.out_dir + "/policy.json";
    const std::string manifest_path = spec.out_dir + "/manifest.json";
    algae::save_metrics(run.result.metrics, spec.method, spec.mode, spec.seed, metrics_path);
    algae::save_policy(run.result.policy, policy_path);

    json manifest{{"command", "train"},
                  {"config", spec_to_json(spec, p)},
                  {"input_hashes", input_hashes},
                  {"outputs",
                   {{metrics_path, algae::content_hash_file(metrics_path)},
                    {policy_path, algae::content_hash_file(policy_path)}}}};
    algae::write_text_file(manifest_path, manifest.dump(2) + "\n");

    std::cout << "final average per-step reward " << format_double(run.final_reward) << "\n"
              << "metrics: " << metrics_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& preset_name, const std::string& data_path,
                 const std::string& policy_path, double alpha, const std::string& divergence,
                 double smoothing) {
    const algae::ExperimentPreset p = algae::preset(preset_name);
    algae::FourRoomsOptions options;
    options.discount = p.discount;
    options.initial = algae::InitialStates::kUniform;
    const algae::FourRooms env(options);
    const algae::TabularMdp& mdp = env.mdp();

    const algae::LoadedExperience loaded = algae::load_experience_file(data_path);
    if (loaded.num_states != mdp.num_states() || loaded.num_actions != mdp.num_actions()) {
        throw algae::ValidationError("dataset dimensions do not match the environment");
    }
    const algae::SoftmaxPolicy target =
        policy_path.empty() ? algae::SoftmaxPolicy::uniform(mdp.num_states(), mdp.num_actions())
                            : algae::load_policy(policy_path);
    algae::AlgaeConfig cfg;
    cfg.alpha = alpha;
    cfg.divergence = algae::divergence_from_name(divergence);
    const double estimate = algae::ope_estimate(mdp, target, loaded.data, smoothing, cfg);
    std::cout << format_double(estimate) << "\n";
    std::cout << "true " << format_double(algae::dual_return(mdp, target)) << "\n";
    return 0;
}

int cmd_verify(int seeds) {
    const std::vector<algae::PropertyResult> results = algae::run_verification(seeds);
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.name.size());
    for (const auto& r : results) {
        std::printf("%-*s  %s  %s\n", static_cast<int>(width), r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.detail.c_str());
    }
    const bool ok = algae::all_passed(results);
    std::printf("%zu/%zu properties passed\n",
                static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                       [](const auto& r) { return r.pass; })),
                results.size());
    return ok ? 0 : 1;
}

int cmd_residuals(int steps, std::uint64_t seed, const std::string& out_path) {
    const algae::QualitativeRun run = algae::run_qualitative(steps, seed);
    json maps = json::array();
    for (const algae::ResidualMap& map : run.maps) {
        maps.push_back(algae::residual_map_to_json(map));
    }
    algae::write_text_file(out_path, maps.dump(2) + "\n");
    std::cout << "wrote " << run.maps.size() << " residual maps to " << out_path << "\n";
    return 0;
}

int cmd_compare(int num_seeds, const std::string& preset_name, const std::string& out_path) {
    const algae::ExperimentPreset p = algae::preset(preset_name);
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < num_seeds; ++k) seeds.push_back(static_cast<std::uint64_t>(k));
    const std::vector<algae::ComparisonCell> table = algae::compare(p, seeds);

    std::ostringstream csv;
    csv << "method,mode,mean_final_reward,stddev_final_reward,seeds\n";
    for (const algae::ComparisonCell& cell : table) {
        csv << algae::to_string(cell.method) << ',' << algae::to_string(cell.mode) << ','
            << format_double(cell.mean) << ',' << format_double(cell.stddev) << ','
            << cell.final_rewards.size() << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        algae::write_text_file(out_path, csv.str());
        std::cout << "wrote comparison to " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AlgaeDICE: behavior-agnostic off-policy policy improvement (tabular)"};
    app.require_subcommand(1);

    // collect
    auto* collect = app.add_subcommand("collect", "Generate an off-policy dataset");
    std::string collect_preset = "fig1";
    int collect_traj = -1, collect_len = -1;
    std::uint64_t collect_seed = 0;
    std::string collect_out = "dataset.exp";
    collect->add_option("--preset", collect_preset, "fig1 or fig2");
    collect->add_option("--trajectories", collect_traj, "override trajectory count");
    collect->add_option("--length", collect_len, "override trajectory length");
    collect->add_option("--seed", collect_seed, "master seed");
    collect->add_option("--out", collect_out, "output path");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a policy on Four Rooms");
    TrainSpec spec;
    std::string config_path;
    train_cmd->add_option("--method", spec.method, "algae or ac");
    train_cmd->add_option("--mode", spec.mode, "online or offline");
    train_cmd->add_option("--preset", spec.preset_name, "fig1 or fig2");
    train_cmd->add_option("--divergence", spec.divergence, "quadratic or polynomial:<p>");
    train_cmd->add_option("--alpha", spec.alpha, "regularization weight");
    train_cmd->add_option("--gamma", spec.gamma, "override discount");
    train_cmd->add_option("--steps", spec.steps, "override training steps");
    train_cmd->add_option("--lr", spec.learning_rate, "override learning rate");
    train_cmd->add_option("--seed", spec.seed, "master seed");
    train_cmd->add_option("--smoothing", spec.smoothing, "count smoothing");
    train_cmd->add_option("--dataset", spec.dataset_path, "offline dataset file");
    train_cmd->add_option("--out", spec.out_dir, "output directory");
    train_cmd->add_option("--config", config_path,
                          "JSON config or manifest; flags set after it still override");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Off-policy evaluation on a dataset");
    std::string eval_preset = "fig1", eval_data, eval_policy;
    double eval_alpha = 1e-6, eval_smoothing = algae::kDefaultSmoothing;
    std::string eval_divergence = "quadratic";
    evaluate->add_option("--preset", eval_preset, "environment preset");
    evaluate->add_option("--data", eval_data, "experience file")->required();
    evaluate->add_option("--policy", eval_policy, "target policy JSON (default uniform)");
    evaluate->add_option("--alpha", eval_alpha, "regularization weight");
    evaluate->add_option("--divergence", eval_divergence, "divergence name");
    evaluate->add_option("--smoothing", eval_smoothing, "count smoothing");

    // verify
    auto* verify = app.add_subcommand("verify", "Run the invariant suite on random MDPs");
    int verify_seeds = 10;
    verify->add_option("--seeds", verify_seeds, "instances per property");

    // residuals
    auto* residuals = app.add_subcommand("residuals", "Emit residual-map training sequence");
    int residual_steps = 10;
    std::uint64_t residual_seed = 0;
    std::string residual_out = "residuals.json";
    residuals->add_option("--steps", residual_steps, "training steps");
    residuals->add_option("--seed", residual_seed, "master seed");
    residuals->add_option("--out", residual_out, "output path");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Multi-seed online/offline comparison");
    int compare_seeds = 5;
    std::string compare_preset = "fig2", compare_out;
    compare_cmd->add_option("--seeds", compare_seeds, "number of seeds");
    compare_cmd->add_option("--preset", compare_preset, "fig1 or fig2");
    compare_cmd->add_option("--out", compare_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (collect->parsed()) {
            return cmd_collect(collect_preset, collect_traj, collect_len, collect_seed,
                               collect_out);
        }
        if (train_cmd->parsed()) {
            if (!config_path.empty()) {
                TrainSpec merged;
                spec_from_json(nlohmann::json::parse(algae::read_text_file(config_path)), merged);
                merged.out_dir = spec.out_dir;
                // Explicitly passed flags win over the config file.
                if (train_cmd->count("--method")) merged.method = spec.method;
                if (train_cmd->count("--mode")) merged.mode = spec.mode;
                if (train_cmd->count("--preset")) merged.preset_name = spec.preset_name;
                if (train_cmd->count("--divergence")) merged.divergence = spec.divergence;
                if (train_cmd->count("--alpha")) merged.alpha = spec.alpha;
                if (train_cmd->count("--gamma")) merged.gamma = spec.gamma;
                if (train_cmd->count("--steps")) merged.steps = spec.steps;
                if (train_cmd->count("--lr")) merged.learning_rate = spec.learning_rate;
                if (train_cmd->count("--seed")) merged.seed = spec.seed;
                if (train_cmd->count("--smoothing")) merged.smoothing = spec.smoothing;
                if (train_cmd->count("--dataset")) merged.dataset_path = spec.dataset_path;
                spec = merged;
            }
            return cmd_train(spec);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_preset, eval_data, eval_policy, eval_alpha, eval_divergence,
                                eval_smoothing);
        }
        if (verify->parsed()) return cmd_verify(verify_seeds);
        if (residuals->parsed()) return cmd_residuals(residual_steps, residual_seed, residual_out);
        if (compare_cmd->parsed()) return cmd_compare(compare_seeds, compare_preset, compare_out);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const algae::SolverError& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "solver"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    } catch (const algae::ValidationError& e) {
        std::cerr
            << nlohmann::json{{"error", {{"kind", "validation"}, {"message", e.what()}}}}.dump()
            << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    }
}
