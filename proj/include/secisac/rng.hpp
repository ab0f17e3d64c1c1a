// SPDX-License-Identifier: Apache-2.0
//
// secisac - outage-constrained secure ISAC beamforming
// Copyright (C) 2026 The secisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SECISAC_RNG_HPP
#define SECISAC_RNG_HPP

#include "secisac/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace secisac
{

// Counter-based generator: every draw is a pure function of
// (seed, stream label, counter), so results never depend on draw order
// across substreams or on the standard library's distributions.
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0)
        : key_(mix(seed ^ mix(hash_label(label) + index)))
    {
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * (++counter_)); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (one value per call, no caching).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // CN(0, variance): real and imaginary parts each carry variance / 2.
    cplx complex_normal(double variance = 1.0)
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t hash_label(std::string_view s)
    {
        std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
        for (unsigned char c : s)
        {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace secisac

#endif
