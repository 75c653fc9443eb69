#pragma once

#include <cmath>
#include <cstdint>

// Deterministic, platform-independent random primitives. The simulator keys
// values off cell coordinates with a stateless hash (no stored occupancy
// maps); the Monte Carlo model and the scatter search use a small counter
// RNG seeded per stream, so results never depend on std:: distribution
// internals or on worker count.

namespace aos {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t value) {
    return splitmix64(seed ^ (value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

/// Uniform deviate in [0, 1) from 53 high bits.
inline double to_unit_double(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless hash of a 2D integer cell plus seed and stream tag.
inline uint64_t cell_hash(int64_t cx, int64_t cy, uint64_t seed, uint64_t stream) {
    uint64_t h = hash_combine(seed, stream);
    h = hash_combine(h, static_cast<uint64_t>(cx));
    h = hash_combine(h, static_cast<uint64_t>(cy));
    return h;
}

/// Standard normal deviate from two hash values (Box-Muller).
inline double hash_normal(uint64_t h1, uint64_t h2) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    const double u1 = to_unit_double(h1);  // [0,1)
    const double u2 = to_unit_double(h2);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(two_pi * u2);
}

/// Counter-based generator (splitmix64 stream).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return to_unit_double(next_u64()); }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the Marsaglia polar method (no trig calls).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace aos
