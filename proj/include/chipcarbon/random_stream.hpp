#pragma once

#include <cstdint>

namespace chipcarbon {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based random stream. Every value is a pure function of
/// (seed, parameter, index, attempt, counter), so draw i of parameter j is
/// the same no matter which thread produces it or in what order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t parameter, std::uint64_t index,
                 std::uint64_t attempt = 0)
        : key_(mix64(mix64(mix64(mix64(seed) ^ parameter) ^ index) ^ attempt)) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double next_open_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; consumes two uniforms per call.
    double next_normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace chipcarbon
