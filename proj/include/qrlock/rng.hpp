#pragma once

#include <cmath>
#include <cstdint>

#include "qrlock/errors.hpp"

namespace qrlock {

// splitmix64 step; also used as the integer mixer when deriving substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Combine a seed with a stream label into a new 64-bit seed.
/// mix(mix(seed, purpose), index) gives every task its own stream, so results
/// do not depend on evaluation order or thread count.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (label << 1));
    std::uint64_t a = splitmix64(s);
    s ^= label;
    return a ^ splitmix64(s);
}

// Stream purpose labels. Keep unique; collisions would correlate streams.
namespace streams {
inline constexpr std::uint64_t kPulsePhase = 0x10;
inline constexpr std::uint64_t kLoDrift = 0x20;
inline constexpr std::uint64_t kNoise = 0x30;
inline constexpr std::uint64_t kBootstrap = 0x40;
inline constexpr std::uint64_t kScanPoint = 0x50;
inline constexpr std::uint64_t kSpdCounts = 0x60;
inline constexpr std::uint64_t kSweepPoint = 0x70;
}  // namespace streams

/// xoshiro256++ with splitmix64 seeding. Not cryptographic; chosen for
/// reproducibility across platforms (all arithmetic is exact u64 ops).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    /// Independent substream for task `index` under `purpose`.
    static Rng stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
        return Rng(mix_seed(mix_seed(seed, purpose), index));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller. Consumes exactly two u64 draws;
    /// no cached spare, so stream position stays easy to reason about.
    double gaussian() {
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Poisson by summing exponential waiting times. O(mean) draws; intended
    /// for detector-count scales (mean up to ~1e6).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw ParameterError("poisson mean must be non-negative");
        if (mean == 0.0) return 0;
        if (mean > 1e7) throw ParameterError("poisson mean too large for waiting-time sampling");
        double t = 0.0;
        std::uint64_t n = 0;
        while (true) {
            t -= std::log(1.0 - uniform01());
            if (t >= mean) break;
            ++n;
        }
        return n;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace qrlock
