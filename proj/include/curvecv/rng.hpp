#ifndef CURVECV_RNG_HPP
#define CURVECV_RNG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace curvecv {

// The one generator every seeded operation in this project uses.
//
// splitmix64, as published by Sebastiano Vigna (public domain reference
// implementation). It is pinned here, by name, so that a fold plan built
// on one machine can be reproduced bit-for-bit on another, in any
// language that can write three lines of integer arithmetic:
//
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
//
// The state is seeded directly with the user-facing seed value.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Draw in [0, bound). Plain modulo is part of the pinned recipe; do
    // not replace with rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

inline const std::string& generator_name() {
    static const std::string name = "splitmix64";
    return name;
}

// In-place Fisher-Yates, high index down to 1, j = next_below(i + 1).
// Part of the pinned shuffle recipe; do not "improve".
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

// FNV-1a, used for config and content fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 1469598103934665603ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 1469598103934665603ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

// Keeps string literals away from the (data, len) overload above.
inline std::uint64_t fnv1a64(const char* s, std::uint64_t h = 1469598103934665603ULL) {
    return fnv1a64(std::string_view(s).data(), std::string_view(s).size(), h);
}

std::string hex64(std::uint64_t v);

} // namespace curvecv

#endif
