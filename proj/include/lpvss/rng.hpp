#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lpvss {

// Deterministic random stream. All sampling algorithms are written out here
// instead of using std::*_distribution, whose output is implementation
// defined; every draw is therefore reproducible from (seed, stream) alone.
//
// Stream ids used across the project:
//   0 encoder init, 1 generator init, 2 epoch shuffling, 3 synthetic input,
//   4 synthetic noise, 5 fit_to_target start, 6 baseline init.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller without the cached spare; one draw consumes two uniforms.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(6.283185307179586476925286766559 * u2);
    }

    // uniform index in [0, n)
    std::size_t index(std::size_t n) {
        // modulo bias is negligible for the desk-scale n used here, but use
        // rejection anyway so the stream stays unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<std::size_t>(x % n);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace lpvss
