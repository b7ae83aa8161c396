#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ttrnn {

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
/// the standard); the uniform and normal transforms are done with explicit
/// bit arithmetic instead of std::*_distribution, whose output sequences are
/// implementation-defined. Identical seeds give identical streams.
class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller. No cached spare value, so the RNG
    /// state is exactly the engine state.
    double normal();

    /// Uniform integer in [lo, hi], inclusive. Rejection sampling.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Bernoulli draw with the given success probability.
    bool bernoulli(double p) { return uniform() < p; }

    /// Engine state as decimal text (the standard stream format).
    std::string save_state() const;
    void load_state(const std::string& text);

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace ttrnn
