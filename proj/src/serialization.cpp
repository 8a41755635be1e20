#include "algae/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "algae/errors.hpp"

namespace algae {

namespace {

std::string format_double(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

} // namespace

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
    nlohmann::json j;
    j["num_states"] = mdp.num_states();
    j["num_actions"] = mdp.num_actions();
    j["discount"] = mdp.discount();
    nlohmann::json reward = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) row.push_back(mdp.reward(s, a));
        reward.push_back(row);
    }
    j["reward"] = reward;
    nlohmann::json transition = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        nlohmann::json per_action = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int s2 = 0; s2 < mdp.num_states(); ++s2) row.push_back(mdp.transition(s, a, s2));
            per_action.push_back(row);
        }
        transition.push_back(per_action);
    }
    j["transition"] = transition;
    j["initial_dist"] = std::vector<double>(mdp.initial_dist().begin(), mdp.initial_dist().end());
    return j;
}

TabularMdp mdp_from_json(const nlohmann::json& j) {
    try {
        const int S = j.at("num_states").get<int>();
        const int A = j.at("num_actions").get<int>();
        const double discount = j.at("discount").get<double>();
        Matrix reward(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) reward(s, a) = j.at("reward").at(s).at(a).get<double>();
        Matrix transition(S * A, S);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                for (int s2 = 0; s2 < S; ++s2)
                    transition(pair_index(s, a, A), s2) =
                        j.at("transition").at(s).at(a).at(s2).get<double>();
        Vector initial(S);
        for (int s = 0; s < S; ++s) initial[s] = j.at("initial_dist").at(s).get<double>();
        return TabularMdp(S, A, reward, transition, initial, discount);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed MDP JSON: ") + e.what());
    }
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
    write_text_file(path, mdp_to_json(mdp).dump(2) + "\n");
}

TabularMdp load_mdp(const std::string& path) {
    return mdp_from_json(nlohmann::json::parse(read_text_file(path)));
}

nlohmann::json policy_to_json(const SoftmaxPolicy& pi) {
    nlohmann::json rows = nlohmann::json::array();
    for (int s = 0; s < pi.num_states(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < pi.num_actions(); ++a) row.push_back(pi.logits()(s, a));
        rows.push_back(row);
    }
    return nlohmann::json{{"logits", rows}};
}

SoftmaxPolicy policy_from_json(const nlohmann::json& j) {
    try {
        const auto& rows = j.at("logits");
        const int S = static_cast<int>(rows.size());
        const int A = static_cast<int>(rows.at(0).size());
        Matrix logits(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) logits(s, a) = rows.at(s).at(a).get<double>();
        return SoftmaxPolicy(logits);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed policy JSON: ") + e.what());
    }
}

void save_policy(const SoftmaxPolicy& pi, const std::string& path) {
    write_text_file(path, policy_to_json(pi).dump(2) + "\n");
}

SoftmaxPolicy load_policy(const std::string& path) {
    return policy_from_json(nlohmann::json::parse(read_text_file(path)));
}

nlohmann::json residual_map_to_json(const ResidualMap& map) {
    nlohmann::json grid = nlohmann::json::array();
    for (int row = 0; row < map.grid.rows(); ++row) {
        nlohmann::json r = nlohmann::json::array();
        for (int col = 0; col < map.grid.cols(); ++col) r.push_back(map.grid(row, col));
        grid.push_back(r);
    }
    return nlohmann::json{{"step", map.step}, {"grid", grid}};
}

std::string metrics_to_csv(const std::vector<StepMetrics>& metrics, const std::string& method,
                           const std::string& mode, std::uint64_t seed) {
    std::ostringstream out;
    out << "step,dual_return,objective,zeta_error,grad_norm,method,mode,seed\n";
    for (const StepMetrics& row : metrics) {
        out << row.step << ',' << format_double(row.dual_return) << ','
            << format_double(row.objective) << ',' << format_double(row.zeta_error) << ','
            << format_double(row.grad_norm) << ',' << method << ',' << mode << ',' << seed
            << "\n";
    }
    return out.str();
}

void save_metrics(const std::vector<StepMetrics>& metrics, const std::string& method,
                  const std::string& mode, std::uint64_t seed, const std::string& path) {
    write_text_file(path, metrics_to_csv(metrics, method, mode, seed));
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

std::string content_hash_file(const std::string& path) {
    return content_hash(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace algae
