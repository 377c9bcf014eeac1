#pragma once

#include <cstdint>

namespace buildseg {

/// Counter-based random values: every draw is a pure function of
/// (seed, sample index, draw index), so results do not depend on evaluation
/// order, thread count, or platform. The mixer is the splitmix64 finalizer,
/// whose output is well distributed even for adjacent counter values.
namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t draw(std::uint64_t seed, std::uint64_t sample_index,
                          std::uint64_t draw_index) {
    return mix(mix(mix(seed) ^ sample_index) ^ draw_index);
}

/// Uniform double in [0,1) with 53 random bits.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t draw_index,
                      double lo, double hi) {
    return lo + to_unit(draw(seed, sample_index, draw_index)) * (hi - lo);
}

/// Uniform integer in [0, bound). bound = 0 yields 0.
inline std::uint64_t below(std::uint64_t seed, std::uint64_t sample_index,
                           std::uint64_t draw_index, std::uint64_t bound) {
    if (bound <= 1) return 0;
    return draw(seed, sample_index, draw_index) % bound;
}

inline bool chance(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t draw_index,
                   double probability) {
    return to_unit(draw(seed, sample_index, draw_index)) < probability;
}

} // namespace rng

} // namespace buildseg
