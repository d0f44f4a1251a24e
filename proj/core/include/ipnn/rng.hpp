#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ipnn {

/// splitmix64 step; used to derive independent stream seeds from a master
/// seed so that parallel and serial execution see identical draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0x9E3779B97F4A7C15ULL + 1));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

/// Seeded random source. The engine (mt19937_64) is fully specified by the
/// standard and the distribution transforms below are hand-rolled, so a
/// given seed produces the same stream on every platform. std::*_distribution
/// is deliberately not used: its output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (cosine branch, two draws consumed).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, bound) via multiply-shift.
    std::uint64_t index(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
    }

    /// Uniform sign in {+1, -1}.
    int sign() { return (engine_() >> 63) ? -1 : +1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ipnn
