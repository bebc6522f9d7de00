#pragma once

// Portable counter-keyed random streams. <random> distributions are not
// specified bit-for-bit across standard libraries, so everything that ends up
// in a bundle draws from SplitMix64 (Steele, Lea & Flood 2014) and converts
// bits to numbers with the fixed recipes below.

#include <cstddef>
#include <cstdint>
#include <initializer_list>

namespace dynens {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept { return splitmix64_mix(state_ += kGamma); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1).
    constexpr double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

    /// Uniform integer in [0, bound) by multiply-shift; bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Folds a seed and a tuple of coordinates into one stream key. Each
/// coordinate passes through the mixer, so neighbouring tuples land on
/// unrelated streams.
inline constexpr std::uint64_t stream_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> coords) noexcept {
    std::uint64_t h = splitmix64_mix(seed ^ 0x6a09e667f3bcc909ULL);
    for (const auto c : coords) h = splitmix64_mix(h ^ splitmix64_mix(c + SplitMix64::kGamma));
    return h;
}

inline SplitMix64 keyed_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
    return SplitMix64(stream_key(seed, coords));
}

}  // namespace dynens
