#pragma once

#include <cmath>
#include <cstdint>

namespace dirac {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-style derivation: one independent stream per (seed, index) pair,
// so ensemble members can be generated in any order or in parallel.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next()
    {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0,1]; never returns 0, so log() below is safe.
    double uniform01()
    {
        return ((next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (explicit, so streams are portable
    // across standard libraries).
    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Fair +-1 draw, 64 values per underlying 64-bit word.
    double sign()
    {
        if (bits_left_ == 0) {
            bit_word_ = next();
            bits_left_ = 64;
        }
        double v = (bit_word_ & 1u) ? 1.0 : -1.0;
        bit_word_ >>= 1;
        --bits_left_;
        return v;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    std::uint64_t bit_word_ = 0;
    int bits_left_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dirac
