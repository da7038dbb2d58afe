#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fmfusion {

/// SplitMix64 step, used to mix seeds and derive child streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent child seed from a parent seed and a list of
/// integer tags. Used everywhere a run needs its own stream (per subject,
/// per snippet, per fold/spec/repetition) so any single unit of work can be
/// re-executed in isolation.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = parent ^ 0xd1b54a32d192ed03ULL;
    for (std::uint64_t t : tags) {
        s ^= splitmix64(s) + 0x9e3779b97f4a7c15ULL * (t + 1);
        (void)splitmix64(s);
    }
    return splitmix64(s);
}

/// Deterministic random source. The engine (mt19937_64) is pinned bit-exactly
/// by the standard; the real-valued transforms below are implemented here so
/// that streams do not depend on the standard library's distribution
/// internals. Equal seeds give bit-identical sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed ? seed : 0x853c49e6748fea9bULL) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = 0;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fmfusion
