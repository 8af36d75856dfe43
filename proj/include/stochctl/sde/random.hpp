#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace stochctl::sde {

std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a seed with a tag into a new, well separated seed. Used to give each
/// stage of a computation (iterations, slices, roles) its own seed space.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// xoshiro256** (Blackman & Vigna); satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;
    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t s_[4];
};

/// Stream keyed by (base_seed, point_index, path_index). The same key always
/// yields the same sequence, so work can be split across threads freely.
class RandomStream {
public:
    RandomStream(std::uint64_t base_seed, std::uint64_t point_index, std::uint64_t path_index);

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    void fill_normal(std::span<double> out);

    Xoshiro256& engine() { return engine_; }

private:
    Xoshiro256 engine_;
    std::normal_distribution<double> normal_;
};

} // namespace stochctl::sde
