#ifndef ORLICZ_RNG_HPP
#define ORLICZ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace orlicz {

/// Counter-based generator: output i of a stream is a fixed mix of
/// (seed, i), so any block of the stream can be regenerated independently.
/// Streams for sub-tasks are derived with derive_seed, which keeps every run
/// reproducible from one root seed regardless of worker count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed_, counter_++); }

    /// Uniform double in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection.
    std::uint32_t next_below(std::uint32_t bound) {
        std::uint64_t threshold = (~std::uint64_t{0} / bound) * bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= threshold);
        return static_cast<std::uint32_t>(v % bound);
    }

    /// Standard normal via Box-Muller (one value per call, second discarded
    /// to keep the counter mapping simple).
    double next_normal();

    /// Fisher-Yates shuffle of perm[0..n).
    void shuffle(std::span<int> perm) {
        for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i) {
            int j = static_cast<int>(next_below(static_cast<std::uint32_t>(i + 1)));
            std::swap(perm[i], perm[j]);
        }
    }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed ^ 0xD1B54A32D192ED03ULL, stream);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

inline double CounterRng::next_normal() {
    double u1, u2;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace orlicz

#endif
