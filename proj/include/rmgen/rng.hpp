#ifndef RMGEN_RNG_HPP
#define RMGEN_RNG_HPP

#include <cstdint>
#include <random>

namespace rmgen {

// The standard distributions are implementation-defined, so draws go through
// these helpers to keep datasets identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derives an independent stream, e.g. per scene, from (seed, stream).
    static Rng derived(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return Rng(z ^ (z >> 31));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do v = next();
        while (v >= limit);
        return v % n;
    }

    /// Uniform integer on [lo, hi].
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace rmgen

#endif  // RMGEN_RNG_HPP
