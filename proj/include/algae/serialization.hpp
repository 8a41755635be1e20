#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "algae/four_rooms.hpp"
#include "algae/mdp.hpp"
#include "algae/solver.hpp"

namespace algae {

/// JSON schema: {num_states, num_actions, discount, reward [s][a],
/// transition [s][a][s'], initial_dist}. Probabilities are validated on load
/// by the TabularMdp constructor.
nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& j);
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

nlohmann::json policy_to_json(const SoftmaxPolicy& pi);
SoftmaxPolicy policy_from_json(const nlohmann::json& j);
void save_policy(const SoftmaxPolicy& pi, const std::string& path);
SoftmaxPolicy load_policy(const std::string& path);

nlohmann::json residual_map_to_json(const ResidualMap& map);

/// Metrics CSV: step,dual_return,objective,zeta_error,grad_norm,method,mode,seed.
/// Doubles are printed with round-trip precision so identical runs produce
/// identical bytes.
std::string metrics_to_csv(const std::vector<StepMetrics>& metrics, const std::string& method,
                           const std::string& mode, std::uint64_t seed);
void save_metrics(const std::vector<StepMetrics>& metrics, const std::string& method,
                  const std::string& mode, std::uint64_t seed, const std::string& path);

/// FNV-1a 64-bit digest of a byte string; used to fingerprint run inputs in
/// manifests.
std::string content_hash(const std::string& bytes);
std::string content_hash_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace algae
