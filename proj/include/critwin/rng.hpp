// rng.hpp -- deterministic pseudo-random streams.
//
// Every stochastic routine derives independent streams from (seed, stream id)
// via splitmix64 hashing, so results are reproducible for a given seed and
// invariant under the number of worker threads.  The generator is
// xoshiro256++ (Blackman & Vigna), which is fast and passes BigCrush.

#pragma once

#include <cstdint>

namespace critwin {

// splitmix64 step; also used to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    // Derives an independent stream from a base seed and a stream index by
    // hashing both through splitmix64 before expanding the state.
    explicit Xoshiro256pp(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t mix = seed;
        (void)splitmix64(mix);
        mix ^= 0x6c62272e07bb0142ULL + stream * 0x27d4eb2f165667c5ULL;
        s_[0] = splitmix64(mix);
        s_[1] = splitmix64(mix);
        s_[2] = splitmix64(mix);
        s_[3] = splitmix64(mix);
        // All-zero state is invalid for xoshiro; the hash makes it
        // astronomically unlikely, but guard anyway.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 1;
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
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

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    // Uniform double in (0, 1]; safe as an argument to log().
    double uniform01_positive() {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    // Exactly uniform integer in [0, n), n >= 1 (Lemire's rejection method).
    std::uint64_t uniform_below(std::uint64_t n) {
        using u128 = unsigned __int128;
        std::uint64_t x = (*this)();
        u128 m = static_cast<u128>(x) * n;
        std::uint64_t low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0ULL - n) % n;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<u128>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace critwin
