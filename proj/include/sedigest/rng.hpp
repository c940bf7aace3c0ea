#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

// Deterministic randomness primitives. Everything here is a pure function of
// its seed and produces identical streams on every platform: mt19937_64 is
// fully specified by the standard and the Gaussian/sampling routines below
// avoid the implementation-defined std::*_distribution classes.
namespace sedigest::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Combines a base seed with a stream id so per-topic / per-question draws use
// disjoint streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

// Seeded 64-bit string hash (FNV-1a core, splitmix finalizer).
std::uint64_t hash64(std::string_view bytes, std::uint64_t seed);

// 53-bit uniform in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) via rejection sampling.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n);

// Standard normal deviates via Box-Muller (pair-cached).
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : gen_(seed) {}
    double next();

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// k distinct indices drawn uniformly from [0, n), returned in ascending order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace sedigest::rng
