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

#ifndef SECISAC_SENSING_HPP
#define SECISAC_SENSING_HPP

// Sensing constraints in the common form S(w, v) >= 0.
//
// Every metric provides its value, the gradient with respect to each w_l
// and, when it owns an auxiliary variable v, the gradient with respect to v
// together with the projection onto the feasible set of v. The solver only
// talks to metrics through these four functions.

#include "secisac/beamformer.hpp"
#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/scenario.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace secisac
{

// Echo SINR after a unit-norm receive filter v:
//   S = sum_l |v^T A_0 w_l|^2 - Gamma sum_l sum_{m>=1} |v^T A_m w_l|^2 - Gamma sigma_BS^2
struct SinrMetric
{
    double gamma_threshold = 10.0; // linear
};

struct BeamSample
{
    double theta = 0.0; // rad
    double level = 0.0; // desired a^H R a, W
};

// S = gamma - (1/T) sum_t |P_d(theta_t) - a_t^H (sum_l w_l w_l^H) a_t|^2
struct BeampatternMetric
{
    double gamma_mse = 0.1;
    std::vector<BeamSample> desired;
};

// S = sum_l w_l^H A_0 w_l - sigma_BS^2 (Q^-1(P_FA) - Q^-1(phi))_+^2 / (2 beta_0)
// with beta_0 taken as |beta_0|.
struct DetectionMetric
{
    double p_fa = 0.1;
    double phi = 0.9;
};

// S = log2(1 + sum_l w_l^H (sum_m A_m^H A_m) w_l / sigma_BS^2) - delta
struct MutualInfoMetric
{
    double delta = 1.0;
};

using SensingMetric = std::variant<SinrMetric, BeampatternMetric, DetectionMetric, MutualInfoMetric>;

// Receive filter for metrics that have one.
using AuxVar = std::optional<CVec>;

inline bool uses_aux(const SensingMetric &m) { return std::holds_alternative<SinrMetric>(m); }

inline std::string metric_name(const SensingMetric &m)
{
    return std::visit(
        [](const auto &x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
                return "sinr";
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
                return "beampattern";
            else if constexpr (std::is_same_v<T, DetectionMetric>)
                return "detection";
            else
                return "mutual_info";
        },
        m);
}

inline void validate_metric(const SensingMetric &m)
{
    std::visit(
        [](const auto &x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
            {
                if (!(x.gamma_threshold > 0.0))
                    throw domain_error("sinr metric: threshold must be positive");
            }
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                if (!(x.gamma_mse > 0.0))
                    throw domain_error("beampattern metric: allowable MSE must be positive");
                if (x.desired.empty())
                    throw domain_error("beampattern metric: need at least one sample angle");
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
            {
                if (!(x.p_fa > 0.0 && x.p_fa < 1.0) || !(x.phi > 0.0 && x.phi < 1.0))
                    throw domain_error("detection metric: probabilities must lie in (0, 1)");
            }
            else
            {
                if (!std::isfinite(x.delta))
                    throw domain_error("mutual information metric: delta must be finite");
            }
        },
        m);
}

namespace detail
{
inline void check_aux(const SensingMetric &m, const AuxVar &v, const Scenario &s)
{
    if (uses_aux(m) && !v)
        throw interface_error(metric_name(m) + " metric needs a receive filter");
    if (!uses_aux(m) && v)
        throw interface_error(metric_name(m) + " metric takes no auxiliary variable");
    if (v && v->size() != s.n_antennas)
        throw dimension_error("receive filter length does not match the antenna count");
}

inline double detection_margin(const DetectionMetric &d)
{
    const double delta = q_inverse(d.p_fa) - q_inverse(d.phi);
    return delta > 0.0 ? delta : 0.0;
}

// Echo-power weights |beta_m|^2 N of B = sum_m A_m^H A_m = sum_m |beta_m|^2 N a_m a_m^H.
inline double mi_quadratic(const BeamformerSet &w, const std::vector<RankOneChannel> &paths)
{
    double q = 0.0;
    for (const auto &p : paths)
    {
        const double weight = std::norm(p.beta) * static_cast<double>(p.a.size());
        for (const auto &wl : w.vectors)
            q += weight * std::norm(dot_h(p.a, wl));
    }
    return q;
}
} // namespace detail

// Desired pattern used when a config does not list one: a flat mainlobe of
// the given width around the target angle at the coherent-beam peak level
// N * P_BS, zero elsewhere, sampled on n_angles points over [-90, 90] deg.
inline std::vector<BeamSample> default_beampattern(const Scenario &s, std::size_t n_angles = 181,
                                                   double width_deg = 10.0)
{
    if (n_angles < 1)
        throw dimension_error("default_beampattern: need at least one angle");
    const double theta0 = s.sensing_channels.at(0).theta;
    const double half = 0.5 * width_deg * std::numbers::pi / 180.0;
    const double level = static_cast<double>(s.n_antennas) * s.power_budget;
    std::vector<BeamSample> out;
    for (std::size_t t = 0; t < n_angles; ++t)
    {
        const double deg = (n_angles == 1) ? 0.0 : -90.0 + 180.0 * static_cast<double>(t) / (n_angles - 1);
        const double theta = deg * std::numbers::pi / 180.0;
        out.push_back({theta, std::abs(theta - theta0) <= half + 1e-12 ? level : 0.0});
    }
    return out;
}

// Radiated power a(theta)^H (sum_l w_l w_l^H) a(theta).
inline double beampattern_at(const BeamformerSet &w, double theta, const Scenario &s)
{
    const CVec a = steering_vector(theta, s.n_antennas, s.element_spacing);
    double p = 0.0;
    for (const auto &wl : w.vectors)
        p += std::norm(dot_h(a, wl));
    return p;
}

// Echo SINR with filter u, computed straight from the definition (any norm of u).
inline double sensing_sinr(const BeamformerSet &w, const CVec &u, const Scenario &s)
{
    const auto paths = s.paths();
    double signal = 0.0, clutter = 0.0;
    for (const auto &wl : w.vectors)
    {
        signal += std::norm(dot_t(u, paths[0].apply(wl)));
        for (std::size_t m = 1; m < paths.size(); ++m)
            clutter += std::norm(dot_t(u, paths[m].apply(wl)));
    }
    return signal / (clutter + s.noise_bs * norm_sq(u));
}

// P_D = Q(Q^-1(P_FA) - sqrt(2 beta_0^2 a^H R a / sigma_BS^2)).
inline double detection_probability(const BeamformerSet &w, const Scenario &s, double p_fa)
{
    const double beta0 = std::abs(s.sensing_channels.at(0).beta);
    const double power = beampattern_at(w, s.sensing_channels.at(0).theta, s);
    return q_function(q_inverse(p_fa) - std::sqrt(2.0 * beta0 * beta0 * power / s.noise_bs));
}

// Scale of the constant term of S, used to judge how tight a constraint is.
inline double threshold_scale(const SensingMetric &m, const Scenario &s)
{
    return std::visit(
        [&](const auto &x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
                return x.gamma_threshold * s.noise_bs;
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
                return x.gamma_mse;
            else if constexpr (std::is_same_v<T, DetectionMetric>)
            {
                const double delta = detail::detection_margin(x);
                return s.noise_bs * delta * delta / (2.0 * std::abs(s.sensing_channels.at(0).beta));
            }
            else
                return std::abs(x.delta);
        },
        m);
}

// Upper bound on the Hessian norm of S over {sum_l ||w_l||^2 <= P, ||v|| = 1}.
inline double curvature_bound(const SensingMetric &m, const Scenario &s)
{
    const double n = static_cast<double>(s.n_antennas);
    const double p = s.power_budget;
    return std::visit(
        [&](const auto &x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
            {
                double e = std::norm(s.sensing_channels[0].beta);
                for (std::size_t m = 1; m < s.sensing_channels.size(); ++m)
                    e += x.gamma_threshold * std::norm(s.sensing_channels[m].beta);
                return 2.0 * n * n * std::max(1.0, p) * e;
            }
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                double peak = 0.0;
                for (const auto &d : x.desired)
                    peak = std::max(peak, std::abs(d.level));
                return 8.0 * n * n * p + 4.0 * n * (peak + n * p);
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
                return 2.0 * std::abs(s.sensing_channels[0].beta) * n;
            else
            {
                double b = 0.0;
                for (const auto &path : s.sensing_channels)
                    b += std::norm(path.beta) * n * n;
                return 3.0 / std::numbers::ln2 * b / s.noise_bs;
            }
        },
        m);
}

// Paths precomputed once per scenario; the solver holds one of these.
struct SensingContext
{
    const Scenario *scenario = nullptr;
    std::vector<RankOneChannel> paths;
    std::vector<CVec> sample_steering; // beampattern angles

    SensingContext(const Scenario &s, const SensingMetric &m) : scenario(&s), paths(s.paths())
    {
        if (const auto *bp = std::get_if<BeampatternMetric>(&m))
            for (const auto &smp : bp->desired)
                sample_steering.push_back(steering_vector(smp.theta, s.n_antennas, s.element_spacing));
    }
};

inline double metric_value(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v,
                           const SensingContext &ctx)
{
    const Scenario &s = *ctx.scenario;
    detail::check_aux(metric, v, s);
    return std::visit(
        [&](const auto &x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
            {
                double val = -x.gamma_threshold * s.noise_bs;
                for (std::size_t m = 0; m < ctx.paths.size(); ++m)
                {
                    const double sign = (m == 0) ? 1.0 : -x.gamma_threshold;
                    for (const auto &wl : w.vectors)
                        val += sign * std::norm(ctx.paths[m].bilinear_t(*v, wl));
                }
                return val;
            }
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                double mse = 0.0;
                for (std::size_t t = 0; t < x.desired.size(); ++t)
                {
                    double p = 0.0;
                    for (const auto &wl : w.vectors)
                        p += std::norm(dot_h(ctx.sample_steering[t], wl));
                    const double e = x.desired[t].level - p;
                    mse += e * e;
                }
                return x.gamma_mse - mse / static_cast<double>(x.desired.size());
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
            {
                const double beta0 = std::abs(ctx.paths[0].beta);
                double q = 0.0;
                for (const auto &wl : w.vectors)
                    q += beta0 * std::norm(dot_h(ctx.paths[0].a, wl));
                const double delta = detail::detection_margin(x);
                return q - s.noise_bs * delta * delta / (2.0 * beta0);
            }
            else
            {
                return std::log2(1.0 + detail::mi_quadratic(w, ctx.paths) / s.noise_bs) - x.delta;
            }
        },
        metric);
}

inline double metric_value(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v, const Scenario &s)
{
    return metric_value(metric, w, v, SensingContext(s, metric));
}

inline std::vector<CGrad> metric_grad_w(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v,
                                        const SensingContext &ctx)
{
    const Scenario &s = *ctx.scenario;
    detail::check_aux(metric, v, s);
    const std::size_t n = s.n_antennas;
    std::vector<CGrad> g(w.count(), CGrad(n, cplx{0.0, 0.0}));
    std::visit(
        [&](const auto &x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
            {
                // 2 A_m^H conj(v) v^T A_m w_l = 2 conj(beta_m v^T a_m) (v^T A_m w_l) a_m
                for (std::size_t m = 0; m < ctx.paths.size(); ++m)
                {
                    const auto &p = ctx.paths[m];
                    const double sign = (m == 0) ? 1.0 : -x.gamma_threshold;
                    const cplx vta = dot_t(*v, p.a);
                    const cplx lead = std::conj(p.beta * vta);
                    for (std::size_t l = 0; l < w.count(); ++l)
                    {
                        const cplx s_ml = p.beta * vta * dot_h(p.a, w[l]);
                        axpy(2.0 * sign * lead * s_ml, p.a, g[l]);
                    }
                }
            }
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                const double T_count = static_cast<double>(x.desired.size());
                std::vector<cplx> proj(w.count());
                for (std::size_t t = 0; t < x.desired.size(); ++t)
                {
                    const auto &a = ctx.sample_steering[t];
                    double p = 0.0;
                    for (std::size_t l = 0; l < w.count(); ++l)
                    {
                        proj[l] = dot_h(a, w[l]);
                        p += std::norm(proj[l]);
                    }
                    const double e = x.desired[t].level - p;
                    for (std::size_t l = 0; l < w.count(); ++l)
                        axpy(4.0 / T_count * e * proj[l], a, g[l]);
                }
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
            {
                const auto &p = ctx.paths[0];
                const double beta0 = std::abs(p.beta);
                for (std::size_t l = 0; l < w.count(); ++l)
                    axpy(2.0 * beta0 * dot_h(p.a, w[l]), p.a, g[l]);
            }
            else
            {
                const double denom = s.noise_bs + detail::mi_quadratic(w, ctx.paths);
                for (const auto &p : ctx.paths)
                {
                    const double weight = std::norm(p.beta) * static_cast<double>(p.a.size());
                    for (std::size_t l = 0; l < w.count(); ++l)
                        axpy(2.0 * weight / (std::numbers::ln2 * denom) * dot_h(p.a, w[l]), p.a, g[l]);
                }
            }
        },
        metric);
    return g;
}

inline std::vector<CGrad> metric_grad_w(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v,
                                        const Scenario &s)
{
    return metric_grad_w(metric, w, v, SensingContext(s, metric));
}

inline CGrad metric_grad_v(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v,
                           const SensingContext &ctx)
{
    if (!uses_aux(metric))
        throw interface_error(metric_name(metric) + " metric has no auxiliary variable to differentiate");
    detail::check_aux(metric, v, *ctx.scenario);
    const auto &x = std::get<SinrMetric>(metric);
    CGrad g(v->size(), cplx{0.0, 0.0});
    // 2 conj(A_m w_l) (v^T A_m w_l) = 2 conj(beta_m a_m^H w_l) (v^T A_m w_l) conj(a_m)
    for (std::size_t m = 0; m < ctx.paths.size(); ++m)
    {
        const auto &p = ctx.paths[m];
        const double sign = (m == 0) ? 1.0 : -x.gamma_threshold;
        const cplx vta = dot_t(*v, p.a);
        cplx coeff{0.0, 0.0};
        for (const auto &wl : w.vectors)
        {
            const cplx ahw = dot_h(p.a, wl);
            coeff += std::conj(p.beta * ahw) * (p.beta * vta * ahw);
        }
        coeff *= 2.0 * sign;
        for (std::size_t k = 0; k < g.size(); ++k)
            g[k] += coeff * std::conj(p.a[k]);
    }
    return g;
}

inline CGrad metric_grad_v(const SensingMetric &metric, const BeamformerSet &w, const AuxVar &v, const Scenario &s)
{
    return metric_grad_v(metric, w, v, SensingContext(s, metric));
}

// v / ||v||. Shared by the receive-filter update and project_v.
inline CVec project_unit_sphere(std::span<const cplx> v)
{
    const double nv = norm(v);
    if (!(nv > 0.0) || !std::isfinite(nv))
        throw numeric_error("project_unit_sphere: cannot normalize a zero or non-finite vector");
    return scaled(v, cplx{1.0 / nv, 0.0});
}

inline AuxVar project_v(const SensingMetric &metric, std::span<const cplx> candidate)
{
    if (!uses_aux(metric))
        throw interface_error(metric_name(metric) + " metric has no auxiliary variable to project");
    return project_unit_sphere(candidate);
}

} // namespace secisac

#endif
