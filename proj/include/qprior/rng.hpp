// Copyright 2026 The qprior Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * The single pseudo-random generator used throughout qprior.
 *
 * Generator: xoshiro256** 1.0 (Blackman & Vigna), state seeded by four
 * successive outputs of SplitMix64. Every stochastic operation draws from a
 * stream obtained with `Rng::stream(seed, purpose, index)`, so that angles,
 * gate noise, sampling and readout never share state and every trajectory
 * can be generated independently. All integer paths are bit-reproducible on
 * any platform; the floating conversions use only exact operations.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qprior {

/// Stream tags. Values are arbitrary but frozen: changing one changes every
/// artifact produced with that purpose.
enum class Purpose : std::uint64_t {
    Angles = 0x616e676c6573ULL,
    Noise = 0x6e6f697365ULL,
    Sampling = 0x73616d706c65ULL,
    Readout = 0x726561646f7574ULL,
    Classical = 0x636c617373ULL,
    Shuffle = 0x73687566666cULL,
    Projection = 0x70726f6aULL,
    Gaussian = 0x676175737373ULL,
    Master = 0x6d6173746572ULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t &state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic 64-bit hash of (seed, purpose, index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, Purpose purpose,
                                    std::uint64_t index = 0) noexcept {
    std::uint64_t s = seed ^ static_cast<std::uint64_t>(purpose);
    std::uint64_t h = splitmix64(s);
    s = h ^ (index * 0xd1b54a32d192ed03ULL);
    return splitmix64(s);
}

class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto &word : s_) {
            word = splitmix64(sm);
        }
    }

    static Rng stream(std::uint64_t seed, Purpose purpose,
                      std::uint64_t index = 0) noexcept {
        return Rng(derive_seed(seed, purpose, index));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept {
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
    double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal variate, Marsaglia polar method. The spare variate is
    /// cached, so two consecutive calls consume one accepted pair.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Integer threshold such that `rng.next() < threshold` has probability p
/// (to within 2^-64).
inline std::uint64_t bernoulli_threshold(double p) noexcept {
    if (!(p > 0.0)) {
        return 0;
    }
    if (p >= 1.0) {
        return ~std::uint64_t{0};
    }
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

}  // namespace qprior
