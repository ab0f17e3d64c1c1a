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

#ifndef SECISAC_SOLVER_HPP
#define SECISAC_SOLVER_HPP

// Regularized alternating max-min iteration.
//
//   max_{w in ball, v in Omega_v} min_{y in Omega_y, c >= 0}  y^T psi(w) + c S(w, v)
//
// Each iteration solves the regularized inner problem in closed form
//   y = P_simplex(-psi / lambda),  c = clamp((beta c - S) / (lambda + beta), 0, C)
// and then takes one projected gradient step on (w, v) with step 1 / alpha.
// The iterate sequence is not monotone, so the best sensing-feasible point
// seen so far is tracked separately.

#include "secisac/beamformer.hpp"
#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/projections.hpp"
#include "secisac/rates.hpp"
#include "secisac/rng.hpp"
#include "secisac/scenario.hpp"
#include "secisac/sensing.hpp"
#include "secisac/sop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

namespace secisac
{

struct ScheduleValues
{
    double lambda = 1.0; // ridge on c and y
    double beta = 1.0;   // proximal weight on c
    double alpha = 1.0;  // inverse outer step
    double c_cap = 10.0; // upper bound on c
};

// lambda_k = ls k^(-1/4), beta_k = bs k^(-3), alpha_k = as k^(1/3), C_k = c0 + ln k
struct Schedules
{
    double lambda_scale = 1.0;
    double beta_scale = 1.0;
    double alpha_scale = 1.0;
    double c_cap_base = 10.0;

    ScheduleValues at(std::size_t k) const
    {
        const double kk = static_cast<double>(std::max<std::size_t>(k, 1));
        return {lambda_scale * std::pow(kk, -0.25), beta_scale * std::pow(kk, -3.0),
                alpha_scale * std::cbrt(kk), c_cap_base + std::log(kk)};
    }
};

struct SolverConfig
{
    std::size_t max_iters = 1000;
    Objective objective;
    Schedules schedules;
    bool regularize = true;
    double tol_bisect = kRedundancyTol;
    std::uint64_t seed = 1;
    std::size_t log_every = 0;   // 0: keep only the final record
    bool pin_artificial = false; // hold w_0 at zero
    bool normalize = true;       // solve in budget / noise normalized units
    double init_fill = 0.9;      // fraction of the budget used by w^1
    double sensing_weight = 1.0; // the iteration works on sensing_weight * S
    double multiplier_gain = 1.0; // the c update sees multiplier_gain * (weighted S)

    void validate(std::size_t n_users) const
    {
        if (max_iters < 1)
            throw domain_error("solver config: max_iters must be >= 1");
        if (!(schedules.lambda_scale > 0.0) || !(schedules.beta_scale > 0.0) || !(schedules.alpha_scale > 0.0) ||
            !(schedules.c_cap_base > 0.0))
            throw domain_error("solver config: schedule constants must be positive");
        if (!(tol_bisect >= 0.0))
            throw domain_error("solver config: tol_bisect must be >= 0");
        if (!(init_fill > 0.0 && init_fill <= 1.0))
            throw domain_error("solver config: init_fill must lie in (0, 1]");
        if (!(sensing_weight > 0.0) || !std::isfinite(sensing_weight))
            throw domain_error("solver config: sensing_weight must be positive");
        if (!(multiplier_gain > 0.0) || !std::isfinite(multiplier_gain))
            throw domain_error("solver config: multiplier_gain must be positive");
        objective.validate(n_users);
    }
};

// psi and S at one point, kept together so nothing is evaluated twice.
struct Evaluation
{
    UtilityVector utility;
    double sensing = 0.0;   // weighted S
    double objective = 0.0; // min_y y^T psi
};

struct SolverState
{
    BeamformerSet w;
    AuxVar v;
    double c = 1.0;
    std::vector<double> y;
    std::size_t k = 1;

    BeamformerSet best_w;
    AuxVar best_v;
    double best_obj = -std::numeric_limits<double>::infinity();
    bool has_best = false;
};

struct TrajectoryRecord
{
    std::size_t k = 0;
    double objective = 0.0;      // min_y y^T psi at w^{k+1}
    double sensing = 0.0;        // S at (w^{k+1}, v^{k+1}), scenario units
    double penalized = 0.0;      // y^T psi + c S at the iterate the step was taken from
    double c = 0.0;
    double stationarity = 0.0;
    double best_obj = 0.0;
    double wall_time_s = 0.0;
};

struct SolverResult
{
    BeamformerSet best_w;
    AuxVar best_v;
    double best_obj = -std::numeric_limits<double>::infinity();
    bool feasible = false;      // false: no visited point satisfied S >= 0
    double best_sensing = 0.0;  // S at the best point, scenario units
    double final_c = 0.0;
    double final_sensing = 0.0; // S at the last iterate, scenario units
    std::size_t iterations = 0;
    std::vector<TrajectoryRecord> trajectory;
    std::vector<double> best_history; // best_obj after every iteration
};

inline Evaluation evaluate(const BeamformerSet &w, const AuxVar &v, const Scenario &s, const SensingMetric &metric,
                           const SensingContext &ctx, const SolverConfig &cfg)
{
    Evaluation e;
    e.utility = utility_vector(w, s, true, cfg.tol_bisect);
    e.sensing = cfg.sensing_weight * metric_value(metric, w, v, ctx);
    e.objective = cfg.objective.evaluate(e.utility.psi);
    return e;
}

struct InnerResult
{
    double c = 0.0;
    std::vector<double> y;
};

inline InnerResult inner_update(const SolverState &state, const Evaluation &at, const ScheduleValues &sv,
                                const SolverConfig &cfg)
{
    InnerResult r;
    const auto &psi = at.utility.psi;
    if (cfg.regularize)
    {
        r.c = project_box((sv.beta * state.c - cfg.multiplier_gain * at.sensing) / (sv.lambda + sv.beta), 0.0,
                          sv.c_cap);
        if (cfg.objective.kind == Objective::Kind::worst_user)
        {
            std::vector<double> x(psi.size());
            for (std::size_t i = 0; i < psi.size(); ++i)
                x[i] = -psi[i] / sv.lambda;
            r.y = project_simplex(x);
        }
    }
    else
    {
        r.c = at.sensing > 0.0 ? 0.0 : sv.c_cap;
        if (cfg.objective.kind == Objective::Kind::worst_user)
        {
            r.y.assign(psi.size(), 0.0);
            r.y[static_cast<std::size_t>(std::min_element(psi.begin(), psi.end()) - psi.begin())] = 1.0;
        }
    }
    if (cfg.objective.kind == Objective::Kind::weighted)
        r.y = cfg.objective.weights;
    return r;
}

struct OuterResult
{
    BeamformerSet w;
    AuxVar v;
    std::vector<CGrad> grad_w; // J^T y + c grad_w S at the old iterate
    CGrad grad_v;              // c grad_v S, empty without v
};

inline OuterResult outer_update(const SolverState &state, const Scenario &s, const SensingMetric &metric,
                                const SensingContext &ctx, const Evaluation &at, double c_next,
                                const std::vector<double> &y_next, double alpha, const SolverConfig &cfg)
{
    OuterResult r;
    const auto jac = utility_jacobian(state.w, s, at.utility, true);
    r.grad_w = weighted_gradient(jac, y_next);
    if (c_next != 0.0)
    {
        const auto gs = metric_grad_w(metric, state.w, state.v, ctx);
        for (std::size_t l = 0; l < r.grad_w.size(); ++l)
            axpy(c_next * cfg.sensing_weight, gs[l], r.grad_w[l]);
    }
    if (cfg.pin_artificial)
        std::fill(r.grad_w[0].begin(), r.grad_w[0].end(), cplx{0.0, 0.0});

    BeamformerSet step = state.w;
    for (std::size_t l = 0; l < step.count(); ++l)
        axpy(1.0 / alpha, r.grad_w[l], step[l]);
    r.w = project_power_ball(step, s.power_budget);

    r.v = state.v;
    if (uses_aux(metric))
    {
        r.grad_v = metric_grad_v(metric, state.w, state.v, ctx);
        for (auto &z : r.grad_v)
            z *= c_next * cfg.sensing_weight;
        CVec cand = *state.v;
        axpy(1.0 / alpha, r.grad_v, cand);
        try
        {
            r.v = project_v(metric, cand);
        }
        catch (const numeric_error &)
        {
            // Zero candidate: keep the previous filter.
        }
    }
    return r;
}

// Accept the candidate when it is sensing-feasible and
// does not lower the objective.
inline bool track_best(SolverState &state, const BeamformerSet &w, const AuxVar &v, const Evaluation &at)
{
    if (!(at.sensing >= 0.0))
        return false;
    if (state.has_best && !(at.objective >= state.best_obj))
        return false;
    state.best_w = w;
    state.best_v = v;
    state.best_obj = at.objective;
    state.has_best = true;
    return true;
}

namespace detail
{
// Prox residual at unit reference step given the ascent directions.
inline double stationarity_from(const SolverState &state, const Scenario &s, const Evaluation &at,
                                const std::vector<CGrad> &grad_w, const CGrad &grad_v, double c_cap,
                                const SolverConfig &cfg)
{
    double r2 = 0.0;
    BeamformerSet step = state.w;
    for (std::size_t l = 0; l < step.count(); ++l)
        axpy(1.0, grad_w[l], step[l]);
    const auto pw = project_power_ball(step, s.power_budget);
    for (std::size_t l = 0; l < step.count(); ++l)
        for (std::size_t n = 0; n < step[l].size(); ++n)
            r2 += std::norm(state.w[l][n] - pw[l][n]);

    if (state.v && !grad_v.empty())
    {
        CVec cand = *state.v;
        axpy(1.0, grad_v, cand);
        if (norm_sq(cand) > 0.0)
        {
            const auto pv = project_unit_sphere(cand);
            for (std::size_t n = 0; n < cand.size(); ++n)
                r2 += std::norm((*state.v)[n] - pv[n]);
        }
    }

    if (cfg.objective.kind == Objective::Kind::worst_user)
    {
        std::vector<double> x(state.y.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = state.y[i] - at.utility.psi[i];
        const auto py = project_simplex(x);
        for (std::size_t i = 0; i < x.size(); ++i)
            r2 += (state.y[i] - py[i]) * (state.y[i] - py[i]);
    }

    const double rc = state.c - std::clamp(state.c - at.sensing, 0.0, c_cap);
    r2 += rc * rc;
    return std::sqrt(r2);
}
} // namespace detail

inline double stationarity_norm(const SolverState &state, const Scenario &s, const SensingMetric &metric,
                                const SolverConfig &cfg)
{
    const SensingContext ctx(s, metric);
    const auto at = evaluate(state.w, state.v, s, metric, ctx, cfg);
    const auto jac = utility_jacobian(state.w, s, at.utility, true);
    std::vector<double> y = state.y;
    if (cfg.objective.kind == Objective::Kind::weighted)
        y = cfg.objective.weights;
    auto gw = weighted_gradient(jac, y);
    CGrad gv;
    if (state.c != 0.0)
    {
        const auto gs = metric_grad_w(metric, state.w, state.v, ctx);
        for (std::size_t l = 0; l < gw.size(); ++l)
            axpy(state.c * cfg.sensing_weight, gs[l], gw[l]);
    }
    if (cfg.pin_artificial)
        std::fill(gw[0].begin(), gw[0].end(), cplx{0.0, 0.0});
    if (uses_aux(metric))
    {
        gv = metric_grad_v(metric, state.w, state.v, ctx);
        for (auto &z : gv)
            z *= state.c * cfg.sensing_weight;
    }
    return detail::stationarity_from(state, s, at, gw, gv, cfg.schedules.at(state.k).c_cap, cfg);
}

// ---------------------------------------------------------------------------
// Unit normalization.
//
// In scenario units the metric value can be many orders of magnitude away
// from the rates (S ~ 1e-5 with watts and a -96 dBm/Hz noise floor), which
// makes the penalty useless at the prescribed step sizes. The solver
// therefore works with w = sqrt(P) x, unit noise and unit budget. Rates,
// redundancy rates and the sign of S are unchanged; S is scaled by a positive
// constant.

struct NormalizedProblem
{
    Scenario scenario;
    SensingMetric metric;
    double w_scale = 1.0; // w = w_scale * x
    double s_scale = 1.0; // S_scenario = s_scale * S_normalized
};

inline NormalizedProblem normalize_problem(const Scenario &s, const SensingMetric &metric)
{
    NormalizedProblem np{s, metric, std::sqrt(s.power_budget), 1.0};
    const double p = s.power_budget;
    const double sigma = std::sqrt(s.noise_bs);
    Scenario &t = np.scenario;
    for (std::size_t i = 0; i < t.n_users; ++i)
    {
        const double g = std::sqrt(p / t.noise_user[i]);
        for (auto &z : t.user_channels[i])
            z *= g;
        t.noise_user[i] = 1.0;
    }
    for (auto &e : t.eve_snr)
        e *= p;
    for (auto &path : t.sensing_channels)
        path.beta *= std::sqrt(p) / sigma;
    t.noise_bs = 1.0;
    t.power_budget = 1.0;

    std::visit(
        [&](auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
                np.s_scale = s.noise_bs;
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                m.gamma_mse /= p * p;
                for (auto &smp : m.desired)
                    smp.level /= p;
                np.s_scale = p * p;
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
                np.s_scale = sigma * std::sqrt(p);
            else
                np.s_scale = 1.0;
        },
        np.metric);
    return np;
}

inline CVec initial_filter(const Scenario &s)
{
    // The filter acts through v^T, so conj(a) points it at the target.
    const CVec a = s.path(0).a;
    return scaled(conj(a), cplx{1.0 / std::sqrt(static_cast<double>(s.n_antennas)), 0.0});
}

inline SolverState initial_state(const Scenario &s, const SensingMetric &metric, const SolverConfig &cfg)
{
    SolverState st;
    CounterRng rng(cfg.seed, "solver-init");
    st.w = random_beamformers(s.n_antennas, s.n_users, s.power_budget, cfg.init_fill, rng);
    if (cfg.pin_artificial)
        std::fill(st.w[0].begin(), st.w[0].end(), cplx{0.0, 0.0});
    if (uses_aux(metric))
        st.v = initial_filter(s);
    st.c = 1.0;
    st.y = (cfg.objective.kind == Objective::Kind::weighted)
               ? cfg.objective.weights
               : std::vector<double>(s.n_users, 1.0 / static_cast<double>(s.n_users));
    st.k = 1;
    return st;
}

// The iteration proper, on whatever units the caller hands in.
inline SolverResult run_raw(const Scenario &s, const SensingMetric &metric, const SolverConfig &cfg,
                            double s_scale = 1.0)
{
    s.validate();
    validate_metric(metric);
    cfg.validate(s.n_users);

    const auto t0 = std::chrono::steady_clock::now();
    const SensingContext ctx(s, metric);
    SolverState st = initial_state(s, metric, cfg);
    Evaluation at = evaluate(st.w, st.v, s, metric, ctx, cfg);
    track_best(st, st.w, st.v, at);

    SolverResult res;
    res.best_history.reserve(cfg.max_iters);
    for (std::size_t k = 1; k <= cfg.max_iters; ++k)
    {
        st.k = k;
        const auto sv = cfg.schedules.at(k);
        const auto inner = inner_update(st, at, sv, cfg);
        const auto outer = outer_update(st, s, metric, ctx, at, inner.c, inner.y, sv.alpha, cfg);

        const bool log = (cfg.log_every > 0 && k % cfg.log_every == 0) || k == cfg.max_iters;
        TrajectoryRecord rec;
        if (log)
        {
            SolverState probe = st;
            probe.c = inner.c;
            probe.y = inner.y;
            rec.stationarity = detail::stationarity_from(probe, s, at, outer.grad_w, outer.grad_v, sv.c_cap, cfg);
            double yp = 0.0;
            for (std::size_t i = 0; i < inner.y.size(); ++i)
                yp += inner.y[i] * at.utility.psi[i];
            rec.penalized = yp + inner.c * at.sensing;
        }

        st.c = inner.c;
        st.y = inner.y;
        st.w = outer.w;
        st.v = outer.v;
        at = evaluate(st.w, st.v, s, metric, ctx, cfg);
        track_best(st, st.w, st.v, at);
        res.best_history.push_back(st.best_obj);

        if (log)
        {
            rec.k = k;
            rec.objective = at.objective;
            rec.sensing = at.sensing / cfg.sensing_weight * s_scale;
            rec.c = st.c;
            rec.best_obj = st.best_obj;
            rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            res.trajectory.push_back(rec);
        }
    }

    res.iterations = cfg.max_iters;
    res.final_c = st.c;
    res.final_sensing = at.sensing / cfg.sensing_weight * s_scale;
    res.feasible = st.has_best;
    res.best_obj = st.best_obj;
    if (st.has_best)
    {
        res.best_w = st.best_w;
        res.best_v = st.best_v;
        res.best_sensing = metric_value(metric, st.best_w, st.best_v, ctx) * s_scale;
    }
    return res;
}

// Solve one instance. Best beamformers are returned in scenario units.
inline SolverResult run(const Scenario &s, const SensingMetric &metric, const SolverConfig &cfg)
{
    if (!cfg.normalize)
        return run_raw(s, metric, cfg);
    s.validate();
    validate_metric(metric);
    const auto np = normalize_problem(s, metric);
    // Weight S by its curvature bound so the (w, v) step sees O(1) Lipschitz
    // constants whatever the geometry.
    SolverConfig local = cfg;
    local.sensing_weight = cfg.sensing_weight / curvature_bound(np.metric, np.scenario);
    // The multiplier reacts to the violation relative to the threshold.
    local.multiplier_gain = cfg.multiplier_gain / (local.sensing_weight * threshold_scale(np.metric, np.scenario));
    auto res = run_raw(np.scenario, np.metric, local, np.s_scale);
    if (res.feasible)
    {
        for (auto &v : res.best_w.vectors)
            for (auto &z : v)
                z *= np.w_scale;
        // Recompute in scenario units so callers see exactly what they would measure.
        res.best_sensing = metric_value(metric, res.best_w, res.best_v, s);
    }
    return res;
}

} // namespace secisac

#endif
