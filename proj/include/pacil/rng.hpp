#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

#include "pacil/rational.hpp"

namespace pacil {

/// SplitMix64 (Steele, Lea & Flood 2014). Chosen over std engines because
/// its output is pinned by the algorithm, not the standard library, so
/// seeded runs reproduce across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform 53-bit integer, the mantissa-sized draw everything else builds on.
    std::uint64_t next_u53() { return next() >> 11; }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u53()) * 0x1.0p-53; }

    /// Uniform dyadic rational k/2^53 in [0, 1); exact, no float round-trip.
    Rational next_unit_rational() {
        return Rational(static_cast<long>(next_u53()), 1L << 53);
    }

    /// Standard normal via the Marsaglia polar method. The second variate
    /// is discarded so the stream position does not depend on call history.
    double next_gaussian() {
        for (;;) {
            double u = 2.0 * next_double() - 1.0;
            double v = 2.0 * next_double() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

private:
    std::uint64_t state_;
};

namespace rng {

inline std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Derives an independent substream seed from (seed, tags...). Adding a new
/// tag value never perturbs streams derived with other tags.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = scramble(seed + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t t : tags) h = scramble(h ^ (t + 0x9E3779B97F4A7C15ULL));
    return h;
}

}  // namespace rng

}  // namespace pacil
