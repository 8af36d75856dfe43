#include "stochctl/sde/random.hpp"

namespace stochctl::sde {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag)
{
    std::uint64_t s = seed ^ 0x6a09e667f3bcc909ULL;
    splitmix64(s);
    s ^= tag * 0xd1b54a32d192ed03ULL;
    return splitmix64(s);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
} // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
    for (auto& w : s_) {
        w = splitmix64(seed);
    }
}

Xoshiro256::result_type Xoshiro256::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

namespace {
std::uint64_t key_seed(std::uint64_t base, std::uint64_t point, std::uint64_t path)
{
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (point + 0x243f6a8885a308d3ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (path + 0x13198a2e03707344ULL);
    return splitmix64(s);
}
} // namespace

RandomStream::RandomStream(std::uint64_t base_seed, std::uint64_t point_index, std::uint64_t path_index)
    : engine_(key_seed(base_seed, point_index, path_index))
{
}

void RandomStream::fill_normal(std::span<double> out)
{
    for (auto& x : out) {
        x = normal_(engine_);
    }
}

} // namespace stochctl::sde
