#pragma once

#include <cstdint>

namespace maximin {

// Stateless counter-based randomness. Every draw is a pure function of a
// 4-word key, so concurrent trial workers can never perturb each other's
// streams and any single draw can be replayed in isolation.

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                  std::uint64_t d) {
    std::uint64_t h = mix64(a);
    h = mix64(h ^ mix64(b + 0xD1B54A32D192ED03ULL));
    h = mix64(h ^ mix64(c + 0x8CB92BA72F3D8DD7ULL));
    h = mix64(h ^ mix64(d + 0xA24BAED4963EE407ULL));
    return h;
}

// uniform on the open interval (0, 1)
inline double counter_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return (static_cast<double>(counter_hash(a, b, c, d) >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace maximin
