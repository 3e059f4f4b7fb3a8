#pragma once

#include <cstdint>
#include <random>

namespace nmfkit {

/// Seeded generator with a fixed uint64 -> double mapping, so streams are
/// bit-identical across platforms (std::uniform_real_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; strictly positive draws.
    double uniform_pos() { return 1.0 - uniform01(); }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace nmfkit
