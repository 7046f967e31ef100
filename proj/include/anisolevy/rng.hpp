#pragma once

#include <cmath>
#include <cstdint>

#include "common.hpp"

namespace anisolevy {

// Deterministic counter-seeded generator: xoshiro256++ with splitmix64 state
// expansion. A stream is identified by (seed, stream_id); distinct stream ids
// give statistically independent sequences, and the mapping is stable across
// platforms and thread schedules, which is what makes run output reproducible
// for any worker count.
class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 0x632be59bd9b4e019ULL));
        for (auto& si : s_) si = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;  // all-zero state is invalid
    }

    std::uint64_t next_u64() {
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

    // Uniform on (0,1), never returning an endpoint (safe under log / pow).
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // Uniform on [0,1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform_pos()); }

    // Box-Muller (cosine branch). One value per call keeps the draw sequence
    // insensitive to call-site reordering.
    double normal() {
        const double r = std::sqrt(2.0 * exponential());
        return r * std::cos(2.0 * pi * uniform_pos());
    }

    // Poisson by inversion for small means, transformed rejection (PTRS,
    // Hoermann 1993) for large ones.
    std::uint64_t poisson(double mean) {
        require(mean >= 0.0 && finite(mean), errc::invalid_argument, "poisson: bad mean");
        if (mean == 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double prod = uniform_pos();
            while (prod > limit) {
                ++k;
                prod *= uniform_pos();
            }
            return k;
        }
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            const double u = uniform_pos() - 0.5;
            const double v = uniform_pos();
            const double us = 0.5 - std::abs(u);
            const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * log_mean - mean - std::lgamma(k + 1.0))
                return static_cast<std::uint64_t>(k);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
};

}  // namespace anisolevy
