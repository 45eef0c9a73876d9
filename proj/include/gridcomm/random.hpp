#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace gridcomm {

// The standard distributions are implementation-defined, so identical seeds
// could produce different episodes under different standard libraries.
// These helpers only rely on the raw mt19937_64 output, which is fully
// specified.

using Rng = std::mt19937_64;

/// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return x % n;
    }
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform_unit(rng) < p;
}

/// SplitMix64 finaliser; used to derive independent sub-seeds from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename Container>
void shuffle(Container& c, Rng& rng) {
    for (std::size_t i = c.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        using std::swap;
        swap(c[i - 1], c[j]);
    }
}

}  // namespace gridcomm
