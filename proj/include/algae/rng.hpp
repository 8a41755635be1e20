#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "algae/errors.hpp"

namespace algae {

/// Seedable random stream that produces identical values on every platform.
///
/// mt19937_64 output is pinned by the standard, but std::*_distribution
/// results are implementation-defined, so sampling is done here from raw
/// 64-bit draws only. Streams are derived from a master seed and a stream
/// index (one stream per trajectory), so parallel generation stays
/// reproducible regardless of scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream_index),
                          static_cast<std::uint32_t>(stream_index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return engine_(); }

    /// Samples an index from an unnormalized nonnegative weight vector by
    /// walking the cumulative sum.
    int categorical(const Eigen::VectorXd& weights) {
        const double total = weights.sum();
        if (!(total > 0.0)) {
            throw ValidationError("categorical sample requires positive total weight");
        }
        const double u = uniform() * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size() - 1);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace algae
