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

#include "secisac/sop.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace secisac;
using namespace secisac::test;
using Catch::Approx;

// Covered tests:
// - Residual and redundancy rate closed forms
// - Degenerate beams and eta = 1
// - Residual monotone in D, root brackets
// - Redundancy gradient vs central differences
// - Exact outage oracle (eigen-decomposition) vs the closed form
// - Monte Carlo outage against the oracle and against eta

namespace
{

// Single-user instance with w_0 = 0 and snr ||w_1||^2 = 1.
Scenario single_user(double eta)
{
    auto s = toy_scenario(2, 1, 1, 0, 3, 1.0);
    s.outage_targets[0] = eta;
    return s;
}

BeamformerSet single_beam()
{
    auto w = BeamformerSet::zeros(2, 1);
    w[1] = {cplx{0.6, 0.0}, cplx{0.0, 0.8}};
    return w;
}

// Pr{ max rate of eavesdropper j >= d } without the independence shortcut.
// With z ~ CN(0, snr I) the event is z^H (Q_i - x sum Q_l) z >= x, a
// quadratic form with one positive eigenvalue lp, so
//   Pr = exp(-x / lp) prod_{lk < 0} lp / (lp - lk).
double exact_outage(const BeamformerSet &w, std::size_t user, double snr, double d)
{
    const std::size_t n = w.n_antennas();
    const double x = std::exp2(d) - 1.0;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t l = 0; l < w.count(); ++l)
    {
        Eigen::VectorXcd v(n);
        for (std::size_t k = 0; k < n; ++k)
            v(k) = w[l][k];
        m += (l == user_slot(user) ? 1.0 : -x) * snr * (v * v.adjoint());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const auto &ev = es.eigenvalues();
    const double lp = ev.maxCoeff();
    if (x <= 0.0)
        return 1.0;
    double p = std::exp(-x / lp);
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (ev(k) < -1e-14 * lp)
            p *= lp / (lp - ev(k));
    return p;
}

BeamformerSet orthogonal_beams(std::size_t n, std::size_t users, CounterRng &rng)
{
    auto w = BeamformerSet::zeros(n, users);
    for (std::size_t l = 0; l < w.count(); ++l)
    {
        w[l] = random_cvec(n, rng);
        for (std::size_t q = 0; q < l; ++q)
            axpy(-dot_h(w[q], w[l]), w[q], w[l]);
        w[l] = unit(w[l]);
    }
    for (auto &v : w.vectors)
    {
        const double a = std::sqrt(rng.uniform(0.05, 0.4));
        for (auto &z : v)
            z *= a;
    }
    return w;
}

} // namespace

TEST_CASE("SOP - Residual")
{
    const auto s = single_user(0.1);
    const auto w = single_beam();
    CHECK(sop_residual(0.0, w, 0, s) == Approx(std::log(0.1)));
    CHECK(sop_residual(1.0, w, 0, s) == Approx(std::log(0.1) + 1.0).epsilon(1e-14));
    CHECK(sop_residual(1.0, w, 0, s) == Approx(-1.302585092994046).epsilon(1e-12));

    const auto s1 = single_user(1.0);
    CHECK(sop_residual(0.0, w, 0, s1) == 0.0);

    CHECK_THROWS_AS(sop_residual(-0.1, w, 0, s), domain_error);
    CHECK_THROWS_AS(sop_residual(0.1, w, 1, s), dimension_error);
    CHECK_THROWS_AS(sop_residual(0.1, BeamformerSet::zeros(2, 1), 0, s), degenerate_beam);
}

TEST_CASE("SOP - Residual is increasing in D")
{
    CounterRng rng(12, "residual-monotone");
    const auto s = toy_scenario(6, 3, 2, 0, 5, 3.0);
    for (int t = 0; t < 20; ++t)
    {
        const auto w = random_beamformers(6, 3, 1.0, rng.uniform(0.2, 1.0), rng);
        double prev = sop_residual(0.0, w, 1, s);
        CHECK(prev == Approx(std::log(0.1)));
        for (double d = 0.05; d < 8.0; d += 0.05)
        {
            const double r = sop_residual(d, w, 1, s);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("SOP - Redundancy rate")
{
    const auto w = single_beam();
    CHECK(solve_redundancy_rate(w, 0, single_user(1.0)) == 0.0);
    CHECK(solve_redundancy_rate(w, 0, single_user(0.1)) == Approx(std::log2(1.0 - std::log(0.1))).epsilon(1e-9));
    CHECK(solve_redundancy_rate(w, 0, single_user(0.1)) == Approx(1.7236).margin(1e-4));
    CHECK(solve_redundancy_rate(BeamformerSet::zeros(2, 1), 0, single_user(0.1)) == 0.0);

    auto no_eves = toy_scenario(2, 1, 0, 0);
    CHECK(solve_redundancy_rate(w, 0, no_eves) == 0.0);

    // The solved rate zeroes the residual and D grows with the eavesdropper SNR.
    CounterRng rng(2, "rate-root");
    for (int t = 0; t < 20; ++t)
    {
        const auto s = toy_scenario(4, 2, 1, 0, 10 + t, std::pow(10.0, rng.uniform(-1.0, 2.0)));
        const auto wt = random_beamformers(4, 2, 1.0, 0.8, rng);
        const double d = solve_redundancy_rate(wt, 1, s, 1e-12);
        CHECK(std::abs(sop_residual(d, wt, 1, s)) < 1e-9);
        auto s2 = s;
        s2.eve_snr[0] *= 2.0;
        CHECK(solve_redundancy_rate(wt, 1, s2) > d);
    }
}

TEST_CASE("SOP - Redundancy gradient")
{
    const auto w = single_beam();
    for (const auto &g : redundancy_gradient(w, 0, single_user(1.0)))
        for (auto z : g)
            CHECK(z == cplx{0.0, 0.0});

    // Single user: the gradient is parallel to w_1 and zero for w_0 = 0.
    const auto g1 = redundancy_gradient(w, 0, single_user(0.1));
    const cplx ratio = g1[1][0] / w[1][0];
    CHECK(std::abs(ratio.imag()) < 1e-12);
    CHECK(std::abs(g1[1][1] - ratio * w[1][1]) < 1e-12);
    CHECK(norm(g1[0]) == 0.0);

    CounterRng rng(21, "redundancy-fd");
    const auto s = toy_scenario(5, 3, 3, 0, 4, 2.0);
    for (int t = 0; t < 10; ++t)
    {
        const auto wt = random_beamformers(5, 3, 1.0, rng.uniform(0.3, 0.9), rng);
        const auto len = lengths_of(wt);
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto fd = finite_diff_gradient(
                [&](std::span<const double> z) {
                    return solve_redundancy_rate(BeamformerSet(unflatten(z, len)), i, s, 0.0);
                },
                flat(wt.vectors), 1e-6);
            CHECK(relative_error(flat(redundancy_gradient(wt, i, s)), fd) < 1e-5);
        }
    }
}

TEST_CASE("SOP - Exact outage oracle")
{
    CounterRng rng(8, "exact-outage");
    const auto s = toy_scenario(6, 3, 1, 0, 2, 5.0);

    // Orthogonal beams: the closed form is exact.
    for (int t = 0; t < 20; ++t)
    {
        const auto w = orthogonal_beams(6, 3, rng);
        for (std::size_t i = 0; i < 3; ++i)
        {
            const double d = solve_redundancy_rate(w, i, s, 1e-13);
            CHECK(exact_outage(w, i, s.eve_snr[0], d) == Approx(0.1).epsilon(1e-8));
        }
    }

    // Correlated beams at low SNR: the closed form stays close.
    const auto low = toy_scenario(6, 3, 1, 0, 2, 0.05);
    for (int t = 0; t < 10; ++t)
    {
        const auto w = random_beamformers(6, 3, 1.0, 0.9, rng);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(exact_outage(w, i, low.eve_snr[0], solve_redundancy_rate(w, i, low)) ==
                  Approx(0.1).margin(5e-3));
    }
}

TEST_CASE("SOP - Monte Carlo outage")
{
    const auto s = toy_scenario(6, 2, 1, 0, 6, 4.0);
    CounterRng rng(13, "mc-outage");
    const auto w = random_beamformers(6, 2, 1.0, 0.9, rng);

    CHECK(monte_carlo_sop(w, 0.0, 0, s, 1000, 1).probability == 1.0);
    CHECK(monte_carlo_sop(w, 50.0, 0, s, 1000, 1).probability == 0.0);
    CHECK_THROWS_AS(monte_carlo_sop(w, 1.0, 0, s, 0, 1), domain_error);
    CHECK_THROWS_AS(monte_carlo_sop(w, 1.0, 5, s, 10, 1), dimension_error);

    // The sampler agrees with the exact law for correlated beams too.
    const std::size_t n = 100000;
    for (double d : {0.3, 1.0, 2.0})
    {
        const double p = exact_outage(w, 0, s.eve_snr[0], d);
        const auto est = monte_carlo_sop(w, d, 0, s, n, 77);
        CHECK(std::abs(est.probability - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n));
    }

    // Orthogonal beams at the solved D: eta within three standard errors.
    const auto wo = orthogonal_beams(6, 2, rng);
    const double d = solve_redundancy_rate(wo, 1, s);
    const auto est = monte_carlo_sop(wo, d, 1, s, n, 5);
    CHECK(std::abs(est.probability - 0.1) <= 3.0 * std::sqrt(0.09 / n));

    // Non-dominant eavesdroppers stay below eta.
    const auto s3 = toy_scenario(6, 2, 3, 0, 6, 4.0);
    const double d3 = solve_redundancy_rate(wo, 0, s3);
    const auto e3 = monte_carlo_sop(wo, d3, 0, s3, 20000, 9);
    CHECK(e3.per_eavesdropper[0] == Approx(0.1).margin(4.0 * std::sqrt(0.09 / 20000)));
    CHECK(e3.per_eavesdropper[1] < 0.1);
    CHECK(e3.per_eavesdropper[2] < 0.1);
    CHECK(e3.probability >= e3.per_eavesdropper[0]);
}
