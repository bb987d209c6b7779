#pragma once

#include <cstdint>

namespace ramplab {

// Splittable counter-style generator built on the SplitMix64 finalizer.
// Each logical task (replication, bootstrap draw, ...) owns an independent
// stream derived deterministically from (seed, stream id), so results are
// reproducible regardless of scheduling or thread count.
class Rng {
public:
    // Stream construction: state0 = mix(seed) ^ mix(stream ^ GOLDEN).
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1): ((x >> 11) + 0.5) * 2^-53.
    double uniform01();

    // Uniform on (lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via inverse-CDF transform (deterministic cross-platform).
    double standard_normal();

    // One full SplitMix64 scramble of a value (stateless).
    static std::uint64_t mix(std::uint64_t x);

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

private:
    std::uint64_t state_;
};

// Stream ids: tag in the top byte keeps replication streams and bootstrap
// streams disjoint under the same seed.
constexpr std::uint64_t kStreamTagReplication = 1;
constexpr std::uint64_t kStreamTagBootstrap = 2;
constexpr std::uint64_t kStreamTagSynthetic = 3;

inline std::uint64_t make_stream(std::uint64_t tag, std::uint64_t index) {
    return (tag << 56) | (index & 0x00FFFFFFFFFFFFFFull);
}

}  // namespace ramplab
