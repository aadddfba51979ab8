#ifndef OPTRX_RNG_HPP
#define OPTRX_RNG_HPP

#include <cstdint>
#include <random>

namespace optrx {

// SplitMix64 finalizer. Used as a seed hash so that per-trial streams are a
// pure function of (master_seed, trial_index), independent of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-trial seed: master seed XOR hash of the trial counter.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t counter) {
    return master_seed ^ splitmix64(counter);
}

// mt19937_64 with a fixed uint64 -> [0,1) conversion. The standard pins the
// engine's output sequence, so results are identical across platforms; the
// conversion is ours because uniform_real_distribution is not pinned.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [a, b).
    double next_in(double a, double b) { return a + (b - a) * next_unit(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // rejection sampling, unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace optrx

#endif
