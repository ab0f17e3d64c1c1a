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

#ifndef SECISAC_SOP_HPP
#define SECISAC_SOP_HPP

// Secrecy outage handling.
//
// With g_j ~ CN(0, rho_j^2 I) known only in distribution, the outage
// constraint Pr{C_ji >= D} <= eta_i is replaced by the deterministic residual
//
//   F(D) = ln eta_i + (2^D - 1) / (snr * |w_i|^2)
//          + sum_{l != i} ln(1 + (2^D - 1) |w_l|^2 / |w_i|^2)
//
// with snr = max_j rho_j^2 / varsigma_j^2. F is strictly increasing in D,
// F(0) = ln eta_i <= 0, so the smallest admissible redundancy rate is the
// unique root, found by bisection. Its gradient follows from the implicit
// function theorem.
//
// Note: the closed-form outage behind F treats the terms g^T w_l as
// independent, which holds exactly when the beamformers are mutually
// orthogonal. For correlated beamformers the true outage differs from eta.

#include "secisac/beamformer.hpp"
#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/rng.hpp"
#include "secisac/scenario.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace secisac
{

// ||w_i||^2 below this fraction of the power budget counts as switched off.
inline constexpr double kDegenerateBeamRatio = 1e-12;
inline constexpr double kRedundancyTol = 1e-10;   // bits
inline constexpr double kRedundancyCap = 64.0;    // bits

// Thrown by sop_residual when the user's own beam is (numerically) zero.
class degenerate_beam : public numeric_error
{
  public:
    using numeric_error::numeric_error;
};

// Users are 0-based; user u is served by beamformer slot u + 1.
inline std::size_t user_slot(std::size_t user) { return user + 1; }

inline bool is_degenerate_beam(const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    return w.power(user_slot(user)) < kDegenerateBeamRatio * s.power_budget;
}

inline double sop_residual(double d, const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    if (user >= s.n_users)
        throw dimension_error("sop_residual: user index out of range");
    if (!(d >= 0.0))
        throw domain_error("sop_residual: redundancy rate must be >= 0");
    if (is_degenerate_beam(w, user, s))
        throw degenerate_beam("sop_residual: beamformer of user " + std::to_string(user) + " is degenerate");

    const std::size_t slot = user_slot(user);
    const double own = w.power(slot);
    const double x = std::expm1(d * std::numbers::ln2); // 2^d - 1
    const double snr = s.max_eve_snr();

    double r = std::log(s.outage_targets[user]);
    if (x > 0.0)
        r += (snr > 0.0) ? x / (snr * own) : std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < w.count(); ++l)
        if (l != slot)
            r += std::log1p(x * w.power(l) / own);
    return r;
}

inline double solve_redundancy_rate(const BeamformerSet &w, std::size_t user, const Scenario &s,
                                    double tol = kRedundancyTol)
{
    if (user >= s.n_users)
        throw dimension_error("solve_redundancy_rate: user index out of range");
    if (s.outage_targets[user] >= 1.0 || s.n_eves == 0 || is_degenerate_beam(w, user, s))
        return 0.0;

    double lo = 0.0, hi = 1.0;
    while (sop_residual(hi, w, user, s) <= 0.0)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > kRedundancyCap)
            throw numeric_error("solve_redundancy_rate: no root below " + std::to_string(kRedundancyCap) + " bits");
    }
    while (hi - lo > tol)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (sop_residual(mid, w, user, s) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Gradient of D_u with respect to every w_l, given the solved rate d.
inline std::vector<CGrad> redundancy_gradient(const BeamformerSet &w, std::size_t user, const Scenario &s, double d)
{
    std::vector<CGrad> g(w.count(), CGrad(w.n_antennas(), cplx{0.0, 0.0}));
    if (d <= 0.0 || s.outage_targets[user] >= 1.0 || s.n_eves == 0 || is_degenerate_beam(w, user, s))
        return g;

    const std::size_t slot = user_slot(user);
    const double own = w.power(slot);
    const double pow2d = std::exp2(d);
    const double x = std::expm1(d * std::numbers::ln2);
    const double snr = s.max_eve_snr();

    // dF/dD = 2^D ln2 [ 1/(snr |w_i|^2) + sum_t |w_t|^2 / tau_t ]
    double bracket = 1.0 / (snr * own);
    for (std::size_t t = 0; t < w.count(); ++t)
        if (t != slot)
            bracket += w.power(t) / (own + x * w.power(t));
    const double dfdd = pow2d * std::numbers::ln2 * bracket;

    for (std::size_t l = 0; l < w.count(); ++l)
    {
        double coeff;
        if (l == slot)
            coeff = 2.0 * x / (own * pow2d * std::numbers::ln2);
        else
            coeff = -2.0 * x / ((own + x * w.power(l)) * dfdd);
        for (std::size_t k = 0; k < g[l].size(); ++k)
            g[l][k] = coeff * w[l][k];
    }
    return g;
}

inline std::vector<CGrad> redundancy_gradient(const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    return redundancy_gradient(w, user, s, solve_redundancy_rate(w, user, s));
}

struct OutageEstimate
{
    double probability = 0.0;            // Pr{max_j C_ju >= d}
    std::vector<double> per_eavesdropper; // Pr{C_ju >= d} for each j
    std::size_t samples = 0;
};

// Draws g_j ~ CN(0, rho_j^2 I) (noise normalized to 1, so rho_j^2 = snr_j)
// and counts how often the eavesdropping rate reaches d.
inline OutageEstimate monte_carlo_sop(const BeamformerSet &w, double d, std::size_t user, const Scenario &s,
                                      std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples == 0)
        throw domain_error("monte_carlo_sop: need at least one sample");
    if (user >= s.n_users)
        throw dimension_error("monte_carlo_sop: user index out of range");
    w.check_against(s);

    const std::size_t slot = user_slot(user);
    const std::size_t n = s.n_antennas;
    OutageEstimate est;
    est.samples = n_samples;
    est.per_eavesdropper.assign(s.n_eves, 0.0);

    std::vector<std::size_t> hits(s.n_eves, 0);
    std::size_t worst_hits = 0;
    CVec g(n);
    std::vector<double> gains(w.count());
    for (std::size_t t = 0; t < n_samples; ++t)
    {
        bool any = false;
        for (std::size_t j = 0; j < s.n_eves; ++j)
        {
            CounterRng rng(seed, "eve-channel", t * s.n_eves + j);
            for (auto &z : g)
                z = rng.complex_normal(s.eve_snr[j]);
            double interference = 1.0;
            for (std::size_t l = 0; l < w.count(); ++l)
            {
                gains[l] = std::norm(dot_t(g, w[l]));
                if (l != slot)
                    interference += gains[l];
            }
            const double rate = std::log2(1.0 + gains[slot] / interference);
            if (rate >= d)
            {
                ++hits[j];
                any = true;
            }
        }
        if (any)
            ++worst_hits;
    }
    for (std::size_t j = 0; j < s.n_eves; ++j)
        est.per_eavesdropper[j] = static_cast<double>(hits[j]) / static_cast<double>(n_samples);
    est.probability = static_cast<double>(worst_hits) / static_cast<double>(n_samples);
    return est;
}

} // namespace secisac

#endif
