#pragma once

#include <cmath>
#include <cstdint>

namespace sfq {

/// Counter-based random stream: every value is a pure function of
/// (seed, stream, counter), so draws are reproducible regardless of the
/// order or thread in which they are requested.
///
/// Mixing is the splitmix64 finalizer applied to the keyed counter; each
/// 64-bit output feeds one uniform double in [0, 1).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Combine two 64-bit keys into one (order-sensitive).
    static std::uint64_t derive(std::uint64_t a, std::uint64_t b) {
        return mix(a ^ (mix(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(derive(derive(seed_, stream_), counter));
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double normal(std::uint64_t counter) const {
        double u1 = uniform(2 * counter);
        double u2 = uniform(2 * counter + 1);
        // Guard against log(0).
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace sfq
