#pragma once

#include <cstdint>

namespace triopt {

/// Deterministic xoshiro256** generator with splitmix64 seeding.
/// Output is identical across platforms and standard libraries, which is
/// what makes same-seed runs byte-reproducible. fork() derives an
/// independent sub-stream (one per variable for SEM noise).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard normal via Box-Muller (second value cached).
    double normal();

    /// Exponential with mean 1.
    double exponential();

    /// Standard Gumbel (location 0, scale 1), mean is Euler-Mascheroni.
    double gumbel();

    /// Independent sub-stream labelled by stream_id.
    Rng fork(std::uint64_t stream_id) const;

private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace triopt
