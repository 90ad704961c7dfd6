#pragma once

#include <cstdint>

namespace linkforge {

// SplitMix64. Pinned so that seeded runs produce identical bytes on every
// platform; std::uniform_*_distribution is implementation-defined and must
// not be used anywhere determinism is promised.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Uniform double in [0, 1).
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return real() < p; }

    /// Independent stream for a subtask; depends only on (seed, tag).
    static Rng fork(std::uint64_t seed, std::uint64_t tag) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
        return Rng(mix.next());
    }

private:
    std::uint64_t state_;
};

}  // namespace linkforge
