#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rvi {

/// splitmix64 finalizer; used to derive independent seeds from (seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Portable random source: std::mt19937_64 (bit-exact across platforms by the
 * standard) with sampling written out here, since the std distributions are
 * implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed(seed ^ mix_seed(stream))) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int index(int n) { return static_cast<int>(uniform() * n); }

    double exponential() { return -std::log1p(-uniform()); }

    /// Flat Dirichlet sample of the given size.
    std::vector<double> dirichlet(int size) {
        std::vector<double> p(static_cast<std::size_t>(size));
        double sum = 0.0;
        for (double& x : p) sum += (x = exponential());
        for (double& x : p) x /= sum;
        return p;
    }

    /// Index drawn from a discrete distribution (weights need not be normalized).
    template <class Range>
    int categorical(const Range& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        int last = -1;
        int i = 0;
        for (double w : weights) {
            if (w > 0.0) {
                last = i;
                if (u < w) return i;
                u -= w;
            }
            ++i;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace rvi
