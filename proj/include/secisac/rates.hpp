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

#ifndef SECISAC_RATES_HPP
#define SECISAC_RATES_HPP

#include "secisac/beamformer.hpp"
#include "secisac/numerics.hpp"
#include "secisac/scenario.hpp"
#include "secisac/sop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace secisac
{

namespace detail
{
// |h_u^T w_l|^2 for every l. Channels act through the plain transpose.
inline std::vector<double> user_gains(const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    const auto &h = s.user_channels.at(user);
    std::vector<double> g(w.count());
    for (std::size_t l = 0; l < w.count(); ++l)
        g[l] = std::norm(dot_t(h, w[l]));
    return g;
}
} // namespace detail

// log2(1 + |h^T w_u|^2 / (sum_{l != u} |h^T w_l|^2 + sigma_u^2)), bits/s/Hz.
inline double achievable_rate(const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    const auto gains = detail::user_gains(w, user, s);
    const std::size_t slot = user_slot(user);
    double interference = s.noise_user[user];
    for (std::size_t l = 0; l < gains.size(); ++l)
        if (l != slot)
            interference += gains[l];
    return std::log2(1.0 + gains[slot] / interference);
}

inline std::vector<CGrad> rate_gradient(const BeamformerSet &w, std::size_t user, const Scenario &s)
{
    const auto &h = s.user_channels.at(user);
    const std::size_t slot = user_slot(user);
    std::vector<cplx> proj(w.count());
    double total = s.noise_user[user];
    for (std::size_t l = 0; l < w.count(); ++l)
    {
        proj[l] = dot_t(h, w[l]);
        total += std::norm(proj[l]);
    }
    const double interference = total - std::norm(proj[slot]);

    std::vector<CGrad> g(w.count(), CGrad(h.size(), cplx{0.0, 0.0}));
    for (std::size_t l = 0; l < w.count(); ++l)
    {
        // 2 conj(h) (h^T w_l) scaled by the derivative of the log terms.
        const double k = (l == slot) ? 1.0 / total : (1.0 / total - 1.0 / interference);
        const cplx c = 2.0 * proj[l] * (k / std::numbers::ln2);
        for (std::size_t n = 0; n < h.size(); ++n)
            g[l][n] = std::conj(h[n]) * c;
    }
    return g;
}

// Inner-layer objective: min over the simplex (worst user) or a fixed
// weight vector (weighted sum).
struct Objective
{
    enum class Kind
    {
        worst_user,
        weighted
    };
    Kind kind = Kind::worst_user;
    std::vector<double> weights; // used when kind == weighted

    static Objective worst_user() { return {}; }
    static Objective weighted(std::vector<double> y) { return {Kind::weighted, std::move(y)}; }

    // min_{y in Omega_y} y^T psi
    double evaluate(const std::vector<double> &psi) const
    {
        if (kind == Kind::worst_user)
            return *std::min_element(psi.begin(), psi.end());
        if (weights.size() != psi.size())
            throw dimension_error("objective: weight count does not match user count");
        double v = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            v += weights[i] * psi[i];
        return v;
    }

    void validate(std::size_t n_users) const
    {
        if (kind != Kind::weighted)
            return;
        if (weights.size() != n_users)
            throw dimension_error("objective: expected " + std::to_string(n_users) + " weights");
        for (double y : weights)
            if (!(y >= 0.0))
                throw domain_error("objective: weights must be nonnegative");
    }
};

struct UtilityVector
{
    std::vector<double> psi;        // per-user utility (secrecy rate or rate)
    std::vector<double> rates;      // R_i
    std::vector<double> redundancy; // D_i, zero when secrecy is off
};

inline UtilityVector utility_vector(const BeamformerSet &w, const Scenario &s, bool secrecy,
                                    double tol = kRedundancyTol)
{
    UtilityVector u;
    for (std::size_t i = 0; i < s.n_users; ++i)
    {
        const double r = achievable_rate(w, i, s);
        const double d = secrecy ? solve_redundancy_rate(w, i, s, tol) : 0.0;
        u.rates.push_back(r);
        u.redundancy.push_back(d);
        u.psi.push_back(r - d);
    }
    return u;
}

// jac[i][l] = grad_{w_l} psi_i.
using UtilityJacobian = std::vector<std::vector<CGrad>>;

inline UtilityJacobian utility_jacobian(const BeamformerSet &w, const Scenario &s, const UtilityVector &u,
                                        bool secrecy)
{
    UtilityJacobian jac;
    jac.reserve(s.n_users);
    for (std::size_t i = 0; i < s.n_users; ++i)
    {
        auto g = rate_gradient(w, i, s);
        if (secrecy)
        {
            const auto gd = redundancy_gradient(w, i, s, u.redundancy[i]);
            for (std::size_t l = 0; l < g.size(); ++l)
                axpy(-1.0, gd[l], g[l]);
        }
        jac.push_back(std::move(g));
    }
    return jac;
}

inline UtilityJacobian utility_jacobian(const BeamformerSet &w, const Scenario &s, bool secrecy)
{
    return utility_jacobian(w, s, utility_vector(w, s, secrecy), secrecy);
}

// sum_i y_i grad_{w_l} psi_i for every l.
inline std::vector<CGrad> weighted_gradient(const UtilityJacobian &jac, const std::vector<double> &y)
{
    if (jac.empty())
        return {};
    std::vector<CGrad> out(jac.front().size(), CGrad(jac.front().front().size(), cplx{0.0, 0.0}));
    for (std::size_t i = 0; i < jac.size(); ++i)
        if (y[i] != 0.0)
            for (std::size_t l = 0; l < out.size(); ++l)
                axpy(y[i], jac[i][l], out[l]);
    return out;
}

} // namespace secisac

#endif
