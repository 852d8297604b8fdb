#pragma once

#include <cstdint>
#include <vector>

namespace wsym {

/// Deterministic 64-bit generator (splitmix64 update). The algorithm is
/// fixed here, not delegated to the standard library, so that fixtures and
/// reports reproduce bit-for-bit across platforms and implementations:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Uniform doubles take the top 53 bits; bounded integers use rejection
/// sampling so there is no modulo bias.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    /// Uniform over {-1.0, +1.0}.
    double pick_sign() { return (next() & 1u) ? 1.0 : -1.0; }

private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle of 0..n-1.
inline std::vector<int> random_permutation(int n, SplitMix64& rng) {
    std::vector<int> image(n);
    for (int i = 0; i < n; ++i) image[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(image[i], image[j]);
    }
    return image;
}

}  // namespace wsym
