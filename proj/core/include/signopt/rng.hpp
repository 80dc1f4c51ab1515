#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace signopt {

/// Deterministic random number generator.
///
/// xoshiro256** seeded through splitmix64. Every draw, including the
/// Gaussian path, is computed from correctly-rounded IEEE-754 arithmetic
/// and a fixed instruction sequence, so a given seed produces the same
/// 64-bit float stream on every conforming platform. Instances are
/// single-owner: do not share one between concurrent tasks.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double next_double();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via Marsaglia's polar method.
    double normal();

    /// Uniform integer in [0, bound), bias-free (rejection sampling).
    std::uint64_t below(std::uint64_t bound);

    /// Independent child generator keyed by (seed, stream). Used to make
    /// epochs, per-seed trials and other sub-streams independently
    /// replayable without consuming this generator's state.
    Rng split(std::uint64_t stream) const;

private:
    std::array<std::uint64_t, 4> state_;
    std::uint64_t seed_;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

/// Natural logarithm from a fixed arithmetic sequence (argument reduction
/// plus an atanh series). Accuracy ~1 ulp. Exists so the Gaussian sampler
/// does not depend on the platform's libm, which is not bit-stable.
double stable_log(double x);

/// Fisher-Yates shuffle driven by `rng`.
void shuffle_indices(std::vector<std::int32_t>& indices, Rng& rng);

/// Mixes a seed and a stream id into a fresh 64-bit seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace signopt
