// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace tensorcs {

/// Seedable generator with reproducible output on every platform.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the words
/// (seed_lo, seed_hi, stream_lo, stream_hi); both algorithms are fully
/// specified by the C++ standard, so (seed, stream) pins the bit sequence.
/// Uniforms take the top 53 bits; normals use the Box-Muller transform and
/// return the two variates of each pair in order (cos branch first).
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_low() { return 1.0 - uniform(); }
    double gaussian();
    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }
    bool coin() { return (engine_() >> 63) != 0; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// SplitMix64 finaliser of (seed, a, b); used to derive independent child
/// seeds for trials and grid points from one top-level seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Stream ids reserved by the library.
inline constexpr std::uint64_t kEnsembleStreamBase = 0x100;  // + mode index
inline constexpr std::uint64_t kNoiseStream = 0x200;
inline constexpr std::uint64_t kSignalStream = 0x300;

}  // namespace tensorcs
