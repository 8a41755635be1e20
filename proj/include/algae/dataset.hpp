#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "algae/mdp.hpp"

namespace algae {

/// Default count smoothing for empirical distributions. Keeps the data
/// distribution strictly positive so density ratios stay bounded.
inline constexpr double kDefaultSmoothing = 1e-6;

/// One logged step: (s, a, r, s').
struct Transition {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;

    bool operator==(const Transition&) const = default;
};

/// Logged experience plus a separate sample of initial states. Nothing here
/// records which policy produced the data.
struct ExperienceSet {
    std::vector<Transition> transitions;
    std::vector<int> initial_states;
    std::uint64_t seed = 0;
    int num_trajectories = 0;
    int trajectory_length = 0;

    bool operator==(const ExperienceSet&) const = default;
};

/// Rolls out `num_trajectories` fixed-length trajectories of `behavior`.
/// Each trajectory starts at s0 ~ mu0 (also recorded in initial_states) and
/// uses its own random stream derived from the seed, so the result is
/// deterministic and independent of evaluation order.
ExperienceSet collect(const TabularMdp& mdp, const SoftmaxPolicy& behavior,
                      int num_trajectories, int trajectory_length, std::uint64_t seed);

/// Smoothed count estimate of the data distribution:
/// d_D(s,a) = (count(s,a) + smoothing) / (N + smoothing * S * A).
Occupancy empirical_distribution(const ExperienceSet& data, int num_states, int num_actions,
                                 double smoothing = kDefaultSmoothing);

/// Infinite-data idealization of the data distribution: the exact visitation
/// of the behavior policy. Useful for separating estimation error from
/// optimization error.
Occupancy exact_behavior_distribution(const TabularMdp& mdp, const SoftmaxPolicy& behavior);

/// Text format: header "algae-exp v1 S=<n> A=<n> seed=<n>", one CSV row
/// "s,a,r,s_next" per transition, then "INITIAL" and one state per line.
/// Doubles are printed with enough digits to round-trip bit-exactly.
void save_experience(const ExperienceSet& data, int num_states, int num_actions,
                     std::ostream& out);
void save_experience_file(const ExperienceSet& data, int num_states, int num_actions,
                          const std::string& path);

struct LoadedExperience {
    ExperienceSet data;
    int num_states = 0;
    int num_actions = 0;
};

LoadedExperience load_experience(std::istream& in);
LoadedExperience load_experience_file(const std::string& path);

} // namespace algae
