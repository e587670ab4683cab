#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace coincast {

/// Seeded random source with fully specified value mappings.
///
/// std::mt19937_64 output is pinned by the standard, and all derived draws
/// below avoid std::*_distribution (whose results are implementation
/// defined), so a given seed produces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n >= 1.
    std::size_t bounded(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Approximate standard normal via the sum of 12 uniforms; libm-free so
    /// the stream stays bit-stable across platforms.
    double normal() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += uniform();
        return s - 6.0;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[bounded(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace coincast
