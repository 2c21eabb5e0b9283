#ifndef DGCN_RNG_HPP_
#define DGCN_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace dgcn {

/// Seed derivation for independent streams: splitmix64 over (base, stream).
/// Keeping this fixed ("rng-v1") makes checkpoints and result files portable
/// across machines and compilers.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic PRNG ("rng-v1"): mt19937_64 with explicit output mappings.
/// std::*_distribution is never used, its output is implementation-defined;
/// the mappings below are bit-exact on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound) by rejection, bound > 0.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = ~0ULL - (~0ULL % bound + 1) % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x > limit);
        return x % bound;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace dgcn

#endif // DGCN_RNG_HPP_
