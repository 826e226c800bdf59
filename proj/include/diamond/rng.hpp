#pragma once

#include <cstdint>

namespace diamond {

// splitmix64: tiny seedable generator with an identical stream on every
// platform, which std::uniform_real_distribution does not guarantee.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]
    double unit_positive() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
};

// Derives an independent stream, e.g. one per trial of an experiment.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t lane) {
    SplitMix64 g(base ^ (0x9e3779b97f4a7c15ULL * (lane + 1)));
    return g.next();
}

}  // namespace diamond
