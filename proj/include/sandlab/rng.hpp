#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace sandlab {

/// splitmix64 step; used for seed mixing and generator initialization.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Combine a base seed with an index (sample number, matrix stream, ...).
/// All per-sample / per-stream seeds in the project are derived through this
/// single function so runs are reproducible regardless of worker count.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

/// Seed for a sampler: a 64-bit value plus a stream index.  Identical
/// (seed, params) reproduce identical samples bit-for-bit on any platform;
/// the standard library's distributions are avoided for that reason.
struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream = 0;

    Seed() = default;
    Seed(std::uint64_t v, std::uint64_t s = 0) : value(v), stream(s) {}

    Seed with_stream(std::uint64_t s) const { return Seed(value, s); }
};

/// xoshiro256** generator (Blackman & Vigna), initialized via splitmix64.
class Xoshiro256 {
public:
    explicit Xoshiro256(Seed seed) {
        std::uint64_t sm = seed.value ^ (0xd2b74407b1ce6e93ULL * (seed.stream + 1));
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform integer in [0, bound) by rejection (Lemire); bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Bernoulli(rho) with a fixed 64-bit threshold, deterministic per rho.
    bool bernoulli(double rho) {
        if (rho <= 0.0) return false;
        if (rho >= 1.0) return true;
        const double scaled = rho * 18446744073709551616.0;  // 2^64
        const auto threshold = static_cast<std::uint64_t>(scaled);
        return next() < threshold;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// Fisher-Yates; perm[i] is the image of i under a uniform random permutation.
inline std::vector<std::uint32_t> random_permutation(std::uint32_t n, Xoshiro256& rng) {
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    for (std::uint32_t i = n; i > 1; --i) {
        auto j = static_cast<std::uint32_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace sandlab
