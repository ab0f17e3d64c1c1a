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

#ifndef SECISAC_BEAMFORMER_HPP
#define SECISAC_BEAMFORMER_HPP

#include "secisac/numerics.hpp"
#include "secisac/rng.hpp"
#include "secisac/scenario.hpp"

#include <vector>

namespace secisac
{

// {w_0, ..., w_I}: w_0 is the artificial (sensing / jamming) beam, w_i
// serves user i.
struct BeamformerSet
{
    std::vector<CVec> vectors;

    BeamformerSet() = default;
    explicit BeamformerSet(std::vector<CVec> v) : vectors(std::move(v)) {}

    static BeamformerSet zeros(std::size_t n_antennas, std::size_t n_users)
    {
        return BeamformerSet(std::vector<CVec>(n_users + 1, CVec(n_antennas, cplx{0.0, 0.0})));
    }

    std::size_t count() const { return vectors.size(); }
    std::size_t n_antennas() const { return vectors.empty() ? 0 : vectors.front().size(); }

    CVec &operator[](std::size_t l) { return vectors[l]; }
    const CVec &operator[](std::size_t l) const { return vectors[l]; }

    double power(std::size_t l) const { return norm_sq(vectors[l]); }

    double total_power() const
    {
        double p = 0.0;
        for (const auto &w : vectors)
            p += norm_sq(w);
        return p;
    }

    void check_against(const Scenario &s) const
    {
        if (vectors.size() != s.n_users + 1)
            throw dimension_error("beamformer set: expected " + std::to_string(s.n_users + 1) + " vectors, got " +
                                  std::to_string(vectors.size()));
        for (std::size_t l = 0; l < vectors.size(); ++l)
            if (vectors[l].size() != s.n_antennas)
                throw dimension_error("beamformer set: w_" + std::to_string(l) + " has length " +
                                      std::to_string(vectors[l].size()) + ", expected " +
                                      std::to_string(s.n_antennas));
    }

    std::vector<std::size_t> block_lengths() const
    {
        std::vector<std::size_t> out;
        for (const auto &w : vectors)
            out.push_back(w.size());
        return out;
    }

    bool operator==(const BeamformerSet &) const = default;
};

// I.i.d. CN(0, 1) entries, rescaled so the total power is exactly
// fill * budget.
inline BeamformerSet random_beamformers(std::size_t n_antennas, std::size_t n_users, double budget, double fill,
                                        CounterRng &rng)
{
    auto w = BeamformerSet::zeros(n_antennas, n_users);
    for (auto &v : w.vectors)
        for (auto &z : v)
            z = rng.complex_normal(1.0);
    const double scale = std::sqrt(fill * budget / w.total_power());
    for (auto &v : w.vectors)
        for (auto &z : v)
            z *= scale;
    return w;
}

} // namespace secisac

#endif
