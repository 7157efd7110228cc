#pragma once

#include <cstdint>
#include <random>

namespace cascadenet {

/// Seedable, splittable generator for Monte Carlo work. Each (seed, stream)
/// pair maps to an independent mt19937_64 state through std::seed_seq, so a
/// run's draws depend only on its index and never on scheduling.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits. Bit-identical across standard
    /// libraries, unlike std::uniform_real_distribution.
    double uniform();

    /// Uniform on [low, high).
    double uniform(double low, double high) { return low + (high - low) * uniform(); }

    /// Uniform integer on [0, n). Uses rejection to stay unbiased.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace cascadenet
