// SPDX-License-Identifier: MIT
#include "tensorcs/rng.hpp"

#include <cmath>
#include <numbers>

namespace tensorcs {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = uniform_open_low();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

}  // namespace tensorcs
