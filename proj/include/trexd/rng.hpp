#pragma once

#include <cstdint>
#include <random>

namespace trexd {

// Seeded random stream. One instance per chain / per training run; never
// shared across threads. Distribution objects are constructed per call so
// the draw sequence depends only on the engine state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    // stddev == 0 returns exactly `mean`.
    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Inclusive on both ends.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    std::uint64_t next() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent per-chain seeds from a
// run seed without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace trexd
