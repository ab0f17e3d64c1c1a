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

#include "catch2/catch_amalgamated.hpp"

#include "secisac/experiment.hpp"
#include "secisac/solver.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace secisac;
using namespace secisac::test;
using Catch::Approx;

// Covered tests:
// - Schedules and config validation
// - Inner closed forms, regularized and raw
// - Outer step fixed points and an independent one-step oracle
// - Best-point tracking rules
// - Stationarity residual
// - Unit normalization
// - End-to-end runs: determinism, monotone best, infeasible instances,
//   pinned artificial beam, plain-rate instance, desk-scale baseline

namespace
{

Evaluation eval_with(double sensing, std::vector<double> psi)
{
    Evaluation e;
    e.sensing = sensing;
    e.utility.psi = std::move(psi);
    e.objective = *std::min_element(e.utility.psi.begin(), e.utility.psi.end());
    return e;
}

SolverState state_with(double c, std::size_t users)
{
    SolverState st;
    st.c = c;
    st.y.assign(users, 1.0 / double(users));
    return st;
}

ExperimentConfig desk_config()
{
    return io::load_experiment(std::string(SECISAC_SOURCE_DIR) + "/configs/desk_sinr.json");
}

} // namespace

TEST_CASE("Solver - Schedules and validation")
{
    Schedules sch;
    const auto s1 = sch.at(1);
    CHECK(s1.lambda == 1.0);
    CHECK(s1.beta == 1.0);
    CHECK(s1.alpha == 1.0);
    CHECK(s1.c_cap == 10.0);
    const auto s8 = sch.at(8);
    CHECK(s8.lambda == Approx(std::pow(8.0, -0.25)));
    CHECK(s8.beta == Approx(1.0 / 512.0));
    CHECK(s8.alpha == Approx(2.0));
    CHECK(s8.c_cap == Approx(10.0 + std::log(8.0)));

    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate(3));
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(3), domain_error);
    cfg = SolverConfig{};
    cfg.schedules.alpha_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(3), domain_error);
    cfg = SolverConfig{};
    cfg.objective = Objective::weighted({0.5, 0.5});
    CHECK_THROWS_AS(cfg.validate(3), dimension_error);
    cfg = SolverConfig{};
    cfg.init_fill = 0.0;
    CHECK_THROWS_AS(cfg.validate(3), domain_error);
}

TEST_CASE("Solver - Inner update")
{
    SolverConfig cfg;
    ScheduleValues sv{1.0, 0.0, 1.0, 10.0};

    auto r = inner_update(state_with(3.0, 3), eval_with(1.0, {0.1, 0.2, 0.3}), sv, cfg);
    CHECK(r.c == 0.0);
    r = inner_update(state_with(3.0, 3), eval_with(-1.0, {0.1, 0.2, 0.3}), sv, cfg);
    CHECK(r.c == 1.0);
    r = inner_update(state_with(0.0, 3), eval_with(-50.0, {0.1, 0.2, 0.3}), sv, cfg);
    CHECK(r.c == 10.0);

    // (beta c - S) / (lambda + beta)
    const ScheduleValues sb{0.5, 0.25, 1.0, 10.0};
    r = inner_update(state_with(2.0, 3), eval_with(-0.3, {0.1, 0.2, 0.3}), sb, cfg);
    CHECK(r.c == Approx((0.25 * 2.0 + 0.3) / 0.75));

    r = inner_update(state_with(1.0, 3), eval_with(0.0, {0.4, 0.4, 0.4}), sv, cfg);
    for (double y : r.y)
        CHECK(y == Approx(1.0 / 3.0));

    // Small ridge: y concentrates on the worst user.
    const ScheduleValues sl{1e-3, 0.0, 1.0, 10.0};
    r = inner_update(state_with(1.0, 3), eval_with(0.0, {0.4, 0.1, 0.3}), sl, cfg);
    CHECK(r.y == std::vector<double>{0.0, 1.0, 0.0});

    SolverConfig raw;
    raw.regularize = false;
    r = inner_update(state_with(1.0, 3), eval_with(1e-9, {0.4, 0.1, 0.1}), sv, raw);
    CHECK(r.c == 0.0);
    CHECK(r.y == std::vector<double>{0.0, 1.0, 0.0});
    r = inner_update(state_with(1.0, 3), eval_with(-1e-9, {0.4, 0.1, 0.1}), sv, raw);
    CHECK(r.c == 10.0);

    SolverConfig weighted;
    weighted.objective = Objective::weighted({0.2, 0.3, 0.5});
    r = inner_update(state_with(1.0, 3), eval_with(0.0, {0.4, 0.1, 0.3}), sv, weighted);
    CHECK(r.y == std::vector<double>{0.2, 0.3, 0.5});
}

TEST_CASE("Solver - Outer update fixed points")
{
    const auto s = toy_scenario(4, 2, 1, 1, 3);
    const SensingMetric m = SinrMetric{2.0};
    const SensingContext ctx(s, m);
    SolverConfig cfg;

    // w = 0 has zero utility gradient; with c = 0 nothing moves.
    SolverState st = state_with(0.0, 2);
    st.w = BeamformerSet::zeros(4, 2);
    st.v = unit(CVec(4, cplx{1.0, 0.0}));
    auto at = evaluate(st.w, st.v, s, m, ctx, cfg);
    auto r = outer_update(st, s, m, ctx, at, 0.0, st.y, 1.0, cfg);
    CHECK(r.w == st.w);
    CHECK(r.v == st.v);

    // Vanishing step.
    CounterRng rng(1, "outer");
    st.w = random_beamformers(4, 2, 1.0, 0.5, rng);
    at = evaluate(st.w, st.v, s, m, ctx, cfg);
    r = outer_update(st, s, m, ctx, at, 2.0, st.y, 1e12, cfg);
    CHECK(relative_error(flat(r.w.vectors), flat(st.w.vectors)) < 1e-10);
    CHECK(relative_error(flatten(std::span<const cplx>(*r.v)), flatten(std::span<const cplx>(*st.v))) < 1e-10);

    // Iterates stay feasible whatever the step.
    for (double alpha : {1e-3, 0.1, 1.0})
    {
        r = outer_update(st, s, m, ctx, at, 5.0, st.y, alpha, cfg);
        CHECK(r.w.total_power() <= 1.0 + 1e-12);
        CHECK(norm(*r.v) == Approx(1.0).margin(1e-12));
    }

    // Pinned artificial beam never moves.
    cfg.pin_artificial = true;
    st.w[0] = CVec(4, cplx{0.0, 0.0});
    r = outer_update(st, s, m, ctx, at, 5.0, st.y, 0.5, cfg);
    CHECK(norm(r.w[0]) == 0.0);
}

TEST_CASE("Solver - One step against an independent update")
{
    // One user, N = 2, no scatterers, no eavesdroppers, SINR metric.
    auto s = toy_scenario(2, 1, 0, 0, 4, 1.0, 2.0);
    const double gamma = 3.0, c = 0.7, alpha = 2.5;
    const SensingMetric m = SinrMetric{gamma};
    const SensingContext ctx(s, m);
    SolverConfig cfg;

    CounterRng rng(2, "toy-step");
    SolverState st = state_with(c, 1);
    st.w = random_beamformers(2, 1, 1.0, 0.6, rng);
    st.v = unit(random_cvec(2, rng));
    const auto at = evaluate(st.w, st.v, s, m, ctx, cfg);
    const auto r = outer_update(st, s, m, ctx, at, c, {1.0}, alpha, cfg);

    // Hand-rolled: grad R = (2/ln2) conj(h) (h^T w_l) (1/T - [l != 1]/I),
    // grad S = 2 A^H conj(v) (v^T A w_l), then a radial projection.
    Eigen::Vector2cd h(s.user_channels[0][0], s.user_channels[0][1]);
    Eigen::Vector2cd v((*st.v)[0], (*st.v)[1]);
    const auto a = steering_vector(s.sensing_channels[0].theta, 2);
    Eigen::Vector2cd av(a[0], a[1]);
    const Eigen::Matrix2cd A = s.sensing_channels[0].beta * av * av.adjoint();
    Eigen::Vector2cd w0(st.w[0][0], st.w[0][1]), w1(st.w[1][0], st.w[1][1]);
    const cplx p0 = h.transpose() * w0, p1 = h.transpose() * w1;
    const double total = 1.0 + std::norm(p0) + std::norm(p1), intf = 1.0 + std::norm(p0);
    Eigen::Vector2cd g0 = (2.0 / std::numbers::ln2) * h.conjugate() * p0 * (1.0 / total - 1.0 / intf);
    Eigen::Vector2cd g1 = (2.0 / std::numbers::ln2) * h.conjugate() * p1 * (1.0 / total);
    g0 += c * 2.0 * A.adjoint() * v.conjugate() * cplx(v.transpose() * A * w0);
    g1 += c * 2.0 * A.adjoint() * v.conjugate() * cplx(v.transpose() * A * w1);
    Eigen::Vector2cd n0 = w0 + g0 / alpha, n1 = w1 + g1 / alpha;
    const double pw = n0.squaredNorm() + n1.squaredNorm();
    if (pw > 1.0)
    {
        n0 /= std::sqrt(pw);
        n1 /= std::sqrt(pw);
    }
    for (int k = 0; k < 2; ++k)
    {
        CHECK(std::abs(r.w[0][static_cast<std::size_t>(k)] - n0(k)) < 1e-10);
        CHECK(std::abs(r.w[1][static_cast<std::size_t>(k)] - n1(k)) < 1e-10);
    }

    // Filter: v + (c / alpha) sum_l 2 conj(A w_l) (v^T A w_l) - Gamma (...), normalized.
    Eigen::Vector2cd gv = Eigen::Vector2cd::Zero();
    for (const auto &wl : {w0, w1})
    {
        const Eigen::Vector2cd aw = A * wl;
        gv += 2.0 * aw.conjugate() * cplx(v.transpose() * aw);
    }
    Eigen::Vector2cd nv = v + (c / alpha) * gv;
    nv.normalize();
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs((*r.v)[static_cast<std::size_t>(k)] - nv(k)) < 1e-10);
}

TEST_CASE("Solver - Best tracking")
{
    SolverState st = state_with(1.0, 2);
    CounterRng rng(3, "track");
    const auto w1 = random_beamformers(3, 2, 1.0, 0.5, rng);
    const auto w2 = random_beamformers(3, 2, 1.0, 0.5, rng);

    CHECK_FALSE(track_best(st, w1, std::nullopt, eval_with(-1e-12, {0.5, 0.6})));
    CHECK_FALSE(st.has_best);

    CHECK(track_best(st, w1, std::nullopt, eval_with(0.0, {0.5, 0.6})));
    CHECK(st.best_obj == 0.5);
    CHECK(st.best_w == w1);

    CHECK_FALSE(track_best(st, w2, std::nullopt, eval_with(1.0, {0.4, 0.9})));
    CHECK(st.best_w == w1);
    CHECK_FALSE(track_best(st, w2, std::nullopt, eval_with(-1.0, {0.9, 0.9})));
    CHECK(track_best(st, w2, std::nullopt, eval_with(2.0, {0.7, 0.55})));
    CHECK(st.best_obj == 0.55);
    CHECK(st.best_w == w2);

    // Recompute the stored objective independently.
    const auto s = toy_scenario(3, 2, 1, 0, 5);
    const SensingMetric m = DetectionMetric{0.3, 0.3};
    SolverConfig cfg;
    const SensingContext ctx(s, m);
    SolverState fresh = state_with(1.0, 2);
    REQUIRE(track_best(fresh, w2, std::nullopt, evaluate(w2, std::nullopt, s, m, ctx, cfg)));
    const double r0 = achievable_rate(w2, 0, s) - solve_redundancy_rate(w2, 0, s);
    const double r1 = achievable_rate(w2, 1, s) - solve_redundancy_rate(w2, 1, s);
    CHECK(fresh.best_obj == Approx(std::min(r0, r1)).epsilon(1e-12));
}

TEST_CASE("Solver - Stationarity")
{
    const auto s = toy_scenario(4, 2, 1, 1, 6);
    SolverConfig cfg;

    // w = 0, c = 0, uniform y and S = 0 is a fixed point of every update.
    const SensingMetric flat_det = DetectionMetric{0.2, 0.2};
    SolverState st = state_with(0.0, 2);
    st.w = BeamformerSet::zeros(4, 2);
    CHECK(stationarity_norm(st, s, flat_det, cfg) == 0.0);

    CounterRng rng(4, "stationarity");
    st.w = random_beamformers(4, 2, 1.0, 0.3, rng);
    st.c = 1.0;
    CHECK(stationarity_norm(st, s, flat_det, cfg) > 0.0);

    const SensingMetric sinr = SinrMetric{2.0};
    st.v = unit(random_cvec(4, rng));
    CHECK(stationarity_norm(st, s, sinr, cfg) > 0.0);
}

TEST_CASE("Solver - Normalization")
{
    GeometryConfig g;
    g.power_budget_dbm = 30.0;
    const auto s = generate_scenario(g, {6, 2, 2, 2});
    CounterRng rng(5, "normalize");
    const auto w = random_beamformers(6, 2, s.power_budget, 0.7, rng);
    const auto v = unit(random_cvec(6, rng));

    std::vector<std::pair<SensingMetric, AuxVar>> cases{{SinrMetric{10.0}, v},
                                                       {BeampatternMetric{0.5, default_beampattern(s)}, std::nullopt},
                                                       {DetectionMetric{0.01, 0.99}, std::nullopt},
                                                       {MutualInfoMetric{2.0}, std::nullopt}};
    for (const auto &[m, aux] : cases)
    {
        const auto np = normalize_problem(s, m);
        BeamformerSet x = w;
        for (auto &vec : x.vectors)
            for (auto &z : vec)
                z /= np.w_scale;
        INFO(metric_name(m));
        CHECK(np.scenario.power_budget == 1.0);
        CHECK(metric_value(m, w, aux, s) ==
              Approx(np.s_scale * metric_value(np.metric, x, aux, np.scenario)).epsilon(1e-9));
        for (std::size_t i = 0; i < 2; ++i)
        {
            CHECK(achievable_rate(x, i, np.scenario) == Approx(achievable_rate(w, i, s)).epsilon(1e-12));
            CHECK(solve_redundancy_rate(x, i, np.scenario) ==
                  Approx(solve_redundancy_rate(w, i, s)).epsilon(1e-8));
        }
    }
}

TEST_CASE("Solver - Runs")
{
    const auto s = toy_scenario(4, 2, 1, 1, 7, 0.5, 4.0);
    const SensingMetric m = SinrMetric{0.5};
    SolverConfig cfg;
    cfg.max_iters = 300;
    cfg.seed = 11;

    const auto a = run(s, m, cfg);
    const auto b = run(s, m, cfg);
    CHECK(a.best_history == b.best_history);
    CHECK(a.best_w == b.best_w);
    CHECK(a.best_history.size() == 300);
    CHECK(std::is_sorted(a.best_history.begin(), a.best_history.end()));
    REQUIRE(a.feasible);
    CHECK(a.best_w.total_power() <= s.power_budget * (1.0 + 1e-12));
    CHECK(a.best_sensing >= -1e-9);
    CHECK(a.best_sensing == Approx(metric_value(m, a.best_w, a.best_v, s)).epsilon(1e-9));
    CHECK(a.trajectory.size() == 1);

    // One iteration: the best point is the better of w^1 and w^2.
    cfg.max_iters = 1;
    const auto one = run(s, m, cfg);
    CHECK(one.best_history.size() == 1);
    CHECK(one.iterations == 1);

    // Logging cadence.
    cfg.max_iters = 100;
    cfg.log_every = 10;
    const auto logged = run(s, m, cfg);
    CHECK(logged.trajectory.size() == 10);
    CHECK(logged.trajectory.back().k == 100);
    for (const auto &rec : logged.trajectory)
    {
        CHECK(rec.c >= 0.0);
        CHECK(rec.stationarity >= 0.0);
    }

    // Unreachable threshold: no feasible point, full trajectory kept.
    cfg.log_every = 1;
    cfg.max_iters = 50;
    const auto bad = run(s, SinrMetric{1e12}, cfg);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.best_obj == -std::numeric_limits<double>::infinity());
    CHECK(bad.trajectory.size() == 50);

    // Pinned artificial beam.
    cfg.log_every = 0;
    cfg.pin_artificial = true;
    const auto pinned = run(s, m, cfg);
    if (pinned.feasible)
        CHECK(norm(pinned.best_w[0]) == 0.0);

    // Raw variant and weighted objective run too.
    SolverConfig raw;
    raw.max_iters = 100;
    raw.regularize = false;
    const auto unreg = run(s, m, raw);
    CHECK(std::is_sorted(unreg.best_history.begin(), unreg.best_history.end()));
    SolverConfig wsum;
    wsum.max_iters = 100;
    wsum.objective = Objective::weighted({0.5, 0.5});
    const auto ws = run(s, m, wsum);
    if (ws.feasible)
    {
        const auto u = utility_vector(ws.best_w, s, true);
        CHECK(ws.best_obj == Approx(0.5 * (u.psi[0] + u.psi[1])).epsilon(1e-6));
    }

    // Unnormalized path gives the same kind of result.
    SolverConfig direct;
    direct.max_iters = 50;
    direct.normalize = false;
    CHECK(run(s, m, direct).best_history.size() == 50);
}

TEST_CASE("Solver - Plain-rate instance")
{
    // eta = 1 and no eavesdroppers: psi is the plain rate.
    auto s = toy_scenario(4, 2, 0, 1, 8, 1.0, 4.0);
    for (auto &e : s.outage_targets)
        e = 1.0;
    SolverConfig cfg;
    cfg.max_iters = 200;
    const auto r = run(s, SinrMetric{0.5}, cfg);
    REQUIRE(r.feasible);
    const double worst = std::min(achievable_rate(r.best_w, 0, s), achievable_rate(r.best_w, 1, s));
    CHECK(r.best_obj == Approx(worst).epsilon(1e-9));
    CHECK(r.best_obj > 0.0);
}

TEST_CASE("Solver - Desk-scale baseline")
{
    const auto cfg = desk_config();
    const auto tr = run_trial(cfg, 0.0, 0);
    REQUIRE(tr.solver.feasible);
    CHECK(tr.solver.best_obj > 0.0);
    CHECK(tr.solver.best_sensing >= 0.0);
    // Regression value of this build, not a reference result.
    CHECK(tr.solver.best_obj == Approx(0.29027468944251789).epsilon(1e-6));
}

TEST_CASE("Solver - Stationarity trend")
{
    auto cfg = desk_config();
    cfg.solver.max_iters = 10000;
    cfg.solver.log_every = 1;
    const auto tr = run_trial(cfg, 0.0, 0);
    const auto &traj = tr.solver.trajectory;
    REQUIRE(traj.size() == 10000);
    auto window_median = [&](std::size_t from) {
        std::vector<double> x;
        for (std::size_t k = from; k < from + 100; ++k)
            x.push_back(traj[k].stationarity);
        return median_of(x);
    };
    CHECK(window_median(9900) < window_median(0));
    CHECK(window_median(9900) < window_median(1000));
}
