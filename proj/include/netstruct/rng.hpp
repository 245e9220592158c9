#ifndef NETSTRUCT_RNG_HPP
#define NETSTRUCT_RNG_HPP

// Random source used throughout the library.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard.  The std::*_distribution adaptors are implementation-defined, so
// every variate below is derived from raw engine bits instead; that keeps
// generated graphs and sampler trajectories identical across toolchains.

#include <cmath>
#include <cstdint>
#include <random>

namespace netstruct {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class rng {
public:
    using result_type = std::uint64_t;

    explicit rng(std::uint64_t seed = 0) : engine_(mix_seed(seed)) {}

    /// Stream for sub-task `index` (restart, chain, bench cell) of a run seeded with `seed`.
    static rng derive(std::uint64_t seed, std::uint64_t index) {
        return rng(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, n); n > 0.  Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Exp(1) variate.
    double exponential() { return -std::log(uniform_open()); }

private:
    std::mt19937_64 engine_;
};

} // namespace netstruct

#endif // NETSTRUCT_RNG_HPP
