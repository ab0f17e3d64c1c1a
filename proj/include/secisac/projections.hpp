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

#ifndef SECISAC_PROJECTIONS_HPP
#define SECISAC_PROJECTIONS_HPP

#include "secisac/beamformer.hpp"
#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace secisac
{

// Euclidean projection onto {y >= 0, sum y = 1}.
//
// y(iota) = [x - iota]_+ with iota found by bisection on [min x - 1, max x],
// where sum y(iota) goes from >= 1 to 0. Once the bracket has settled the
// active set is fixed, so iota is recomputed exactly from it.
inline std::vector<double> project_simplex(const std::vector<double> &x)
{
    if (x.empty())
        throw dimension_error("project_simplex: empty vector");
    for (double xi : x)
        if (!std::isfinite(xi))
            throw domain_error("project_simplex: non-finite input");

    auto excess = [&](double iota) {
        double s = 0.0;
        for (double xi : x)
            s += std::max(xi - iota, 0.0);
        return s - 1.0;
    };

    double lo = *std::min_element(x.begin(), x.end()) - 1.0; // excess(lo) >= 0
    double hi = *std::max_element(x.begin(), x.end());       // excess(hi) = -1
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }

    // Refinement: iota = (sum_{x_i > iota} x_i - 1) / |active|.
    double iota = 0.5 * (lo + hi);
    for (int pass = 0; pass < 4; ++pass)
    {
        double s = 0.0;
        std::size_t k = 0;
        for (double xi : x)
            if (xi > iota)
            {
                s += xi;
                ++k;
            }
        if (k == 0)
            break;
        const double next = (s - 1.0) / static_cast<double>(k);
        if (next == iota)
            break;
        iota = next;
    }

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = std::max(x[i] - iota, 0.0);
    return y;
}

inline double project_box(double c, double lo, double hi)
{
    if (lo > hi)
        throw interface_error("project_box: lower bound exceeds upper bound");
    return std::clamp(c, lo, hi);
}

// Projection onto {sum_l ||w_l||^2 <= P}. The ball is Euclidean in the
// stacked vector, so the projection is a uniform radial scaling.
inline BeamformerSet project_power_ball(const BeamformerSet &w, double p_budget)
{
    if (!(p_budget > 0.0))
        throw domain_error("project_power_ball: budget must be positive");
    const double p = w.total_power();
    if (p <= p_budget)
        return w;
    BeamformerSet out = w;
    const double scale = std::sqrt(p_budget / p);
    for (auto &v : out.vectors)
        for (auto &z : v)
            z *= scale;
    return out;
}

} // namespace secisac

#endif
