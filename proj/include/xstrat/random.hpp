#ifndef XSTRAT_RANDOM_HPP
#define XSTRAT_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

// The standard distributions are implementation-defined, so anything that
// feeds a split goes through the helpers below. Together with the fixed
// std::mt19937_64 engine this keeps splits identical across toolchains.

namespace xstrat::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// Stateless hash of a (seed, stream, index) triple. Used wherever a random
/// decision must not depend on evaluation order.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

/// Maps 64 random bits onto [0, 1) with 53 bits of precision.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11U) * 0x1.0p-53;
}

constexpr double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    return to_unit(mix(seed, stream, index));
}

/// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = engine();
    while (draw >= limit) {
        draw = engine();
    }
    return draw % bound;
}

/// Fisher-Yates shuffle.
template<typename T>
void shuffle(std::span<T> values, std::mt19937_64& engine) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded(engine, i));
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

}  // namespace xstrat::rng

#endif
