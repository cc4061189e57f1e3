#pragma once

#include <cstdint>
#include <limits>

namespace photon_beat {

/// SplitMix64 finaliser; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna). Small state, cheap to construct per
/// trigger, and a UniformRandomBitGenerator so <random> distributions work.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& w : s_)
            w = splitmix64(sm);
    }

    /// Substream for (seed, index, tag): the same triple always yields the same
    /// sequence, whatever order the substreams are created in.
    static Xoshiro256 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0)
    {
        std::uint64_t mix = seed;
        std::uint64_t a = splitmix64(mix);
        mix ^= index * 0xd1b54a32d192ed03ULL;
        std::uint64_t b = splitmix64(mix);
        mix ^= tag * 0x8cb92ba72f3d8dd7ULL;
        return Xoshiro256(a ^ b ^ splitmix64(mix));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
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

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
};

}  // namespace photon_beat
