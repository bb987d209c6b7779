#include "ramplab/rng.hpp"

#include "ramplab/mathx.hpp"

namespace ramplab {

std::uint64_t Rng::mix(std::uint64_t x) {
    x += kGolden;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed) ^ mix(stream ^ kGolden)) {}

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

double Rng::uniform01() {
    const std::uint64_t x = next_u64();
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::standard_normal() {
    return mathx::norm_ppf(uniform01());
}

}  // namespace ramplab
