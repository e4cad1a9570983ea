#pragma once
// Seeded, reproducible random streams. One root seed, per-purpose derived
// sub-seeds, so every component (graph, costs, query endpoints, ...) draws
// from its own independent stream and runs are bit-identical on rerun.

#include <cmath>
#include <cstdint>
#include <span>

namespace costgreedy {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t hash64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return hash64(seed + 0x9e3779b97f4a7c15ull * (tag + 1));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return derive_seed(derive_seed(seed, a, b), c);
}

// Stream purposes. Distinct tags keep e.g. training pairs, evaluation pairs
// and edge costs statistically independent of each other.
namespace stream {
inline constexpr std::uint64_t kGraph = 1;
inline constexpr std::uint64_t kDegrees = 2;
inline constexpr std::uint64_t kCosts = 3;
inline constexpr std::uint64_t kTrainPairs = 4;
inline constexpr std::uint64_t kTrainCosts = 5;
inline constexpr std::uint64_t kEvalPairs = 6;
inline constexpr std::uint64_t kEvalCosts = 7;
inline constexpr std::uint64_t kPerturb = 8;
inline constexpr std::uint64_t kWald = 9;
inline constexpr std::uint64_t kProperty = 10;
}  // namespace stream

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). Multiply-shift; bias is O(bound/2^64).
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    double exponential(double rate) { return -std::log1p(-u01()) / rate; }

    // Index into a cumulative distribution (cdf ascending, back() == total mass).
    std::size_t pick_cdf(std::span<const double> cdf) {
        const double u = u01() * cdf.back();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

private:
    std::uint64_t state_;
};

}  // namespace costgreedy
