#include "algae/dataset.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "algae/errors.hpp"
#include "algae/mdp_core.hpp"
#include "algae/rng.hpp"

namespace algae {

ExperienceSet collect(const TabularMdp& mdp, const SoftmaxPolicy& behavior,
                      int num_trajectories, int trajectory_length, std::uint64_t seed) {
    if (num_trajectories <= 0 || trajectory_length <= 0) {
        throw ValidationError("collect requires positive trajectory counts");
    }
    const int A = mdp.num_actions();

    ExperienceSet data;
    data.seed = seed;
    data.num_trajectories = num_trajectories;
    data.trajectory_length = trajectory_length;
    data.transitions.reserve(static_cast<std::size_t>(num_trajectories) * trajectory_length);
    data.initial_states.reserve(num_trajectories);

    const Matrix& probs = behavior.probabilities();
    for (int k = 0; k < num_trajectories; ++k) {
        RandomStream stream(seed, static_cast<std::uint64_t>(k));
        int s = stream.categorical(mdp.initial_dist());
        data.initial_states.push_back(s);
        for (int t = 0; t < trajectory_length; ++t) {
            const int a = stream.categorical(probs.row(s).transpose());
            const int s_next =
                stream.categorical(mdp.transition_matrix().row(pair_index(s, a, A)).transpose());
            data.transitions.push_back({s, a, mdp.reward(s, a), s_next});
            s = s_next;
        }
    }
    return data;
}

Occupancy empirical_distribution(const ExperienceSet& data, int num_states, int num_actions,
                                 double smoothing) {
    if (smoothing < 0.0) throw ValidationError("smoothing must be nonnegative");
    if (data.transitions.empty()) throw ValidationError("experience set is empty");
    Vector counts = Vector::Zero(num_states * num_actions);
    for (const Transition& t : data.transitions) {
        if (t.state < 0 || t.state >= num_states || t.action < 0 || t.action >= num_actions ||
            t.next_state < 0 || t.next_state >= num_states) {
            throw ValidationError("transition indices out of bounds");
        }
        counts[pair_index(t.state, t.action, num_actions)] += 1.0;
    }
    const double n = static_cast<double>(data.transitions.size());
    const double denom = n + smoothing * num_states * num_actions;
    Vector d = (counts.array() + smoothing) / denom;
    return Occupancy(num_states, num_actions, std::move(d));
}

Occupancy exact_behavior_distribution(const TabularMdp& mdp, const SoftmaxPolicy& behavior) {
    return visitation(mdp, behavior);
}

void save_experience(const ExperienceSet& data, int num_states, int num_actions,
                     std::ostream& out) {
    out << "algae-exp v1 S=" << num_states << " A=" << num_actions << " seed=" << data.seed
        << " trajectories=" << data.num_trajectories << " length=" << data.trajectory_length
        << "\n";
    char buffer[64];
    for (const Transition& t : data.transitions) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", t.reward);
        out << t.state << ',' << t.action << ',' << buffer << ',' << t.next_state << "\n";
    }
    out << "INITIAL\n";
    for (int s : data.initial_states) out << s << "\n";
}

void save_experience_file(const ExperienceSet& data, int num_states, int num_actions,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    save_experience(data, num_states, num_actions, out);
}

LoadedExperience load_experience(std::istream& in) {
    LoadedExperience loaded;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("experience file is empty");
    std::uint64_t seed = 0;
    int trajectories = 0, length = 0;
    if (std::sscanf(line.c_str(), "algae-exp v1 S=%d A=%d seed=%" SCNu64
                    " trajectories=%d length=%d",
                    &loaded.num_states, &loaded.num_actions, &seed, &trajectories,
                    &length) != 5) {
        throw ValidationError("bad experience header: " + line);
    }
    loaded.data.seed = seed;
    loaded.data.num_trajectories = trajectories;
    loaded.data.trajectory_length = length;

    bool in_initial = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "INITIAL") {
            in_initial = true;
            continue;
        }
        if (in_initial) {
            loaded.data.initial_states.push_back(std::stoi(line));
        } else {
            Transition t;
            char* end = nullptr;
            std::istringstream row(line);
            std::string field;
            if (!std::getline(row, field, ',')) throw ValidationError("bad row: " + line);
            t.state = std::stoi(field);
            if (!std::getline(row, field, ',')) throw ValidationError("bad row: " + line);
            t.action = std::stoi(field);
            if (!std::getline(row, field, ',')) throw ValidationError("bad row: " + line);
            t.reward = std::strtod(field.c_str(), &end);
            if (!std::getline(row, field, ',')) throw ValidationError("bad row: " + line);
            t.next_state = std::stoi(field);
            loaded.data.transitions.push_back(t);
        }
    }
    if (loaded.data.transitions.empty()) throw ValidationError("experience file has no rows");
    return loaded;
}

LoadedExperience load_experience_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return load_experience(in);
}

} // namespace algae
