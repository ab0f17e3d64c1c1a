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

// secisac run|gradcheck|sopcheck --config PATH [options]
//
// Exit codes: 0 success, 1 config error, 2 verification failure,
// 3 numeric failure.

#include "secisac/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <thread>

using namespace secisac;

namespace
{

int report_gradcheck(const GradCheckReport &rep)
{
    std::cout << std::left << std::setw(16) << "family" << std::setw(10) << "checks"
              << "max_rel_error\n";
    for (const auto &f : rep.families)
        std::cout << std::setw(16) << f.name << std::setw(10) << f.checks << std::scientific << std::setprecision(3)
                  << f.max_rel_error << std::defaultfloat << (f.max_rel_error <= rep.tolerance ? "" : "  FAIL")
                  << '\n';
    const bool ok = rep.passed();
    std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (tolerance " << rep.tolerance << ")\n";
    return ok ? exit_ok : exit_verification;
}

int report_sopcheck(const SopCheckReport &rep)
{
    std::cout << "dominant eavesdropper: " << rep.dominant << '\n';
    std::cout << "set user eta      D          empirical  tolerance  per-eavesdropper\n";
    for (const auto &r : rep.rows)
    {
        std::cout << std::setw(3) << r.set << ' ' << std::setw(4) << r.user << ' ' << std::fixed
                  << std::setprecision(4) << std::setw(9) << r.eta << ' ' << std::setw(10) << r.redundancy << ' '
                  << std::setw(10) << r.empirical << ' ' << std::setw(10) << r.tolerance << ' ';
        for (double p : r.per_eavesdropper)
            std::cout << p << ' ';
        std::cout << (r.checked ? (r.passed ? "" : " FAIL") : " (eta = 1, not checked)") << '\n';
        std::cout << std::defaultfloat;
    }
    const bool ok = rep.passed();
    std::cout << (ok ? "sopcheck passed" : "sopcheck FAILED") << '\n';
    return ok ? exit_ok : exit_verification;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Outage-constrained secure ISAC beamforming experiments"};
    app.require_subcommand(1);

    std::string config_path;
    RunOptions opts;
    std::size_t trials = 0, log_every = 0, threads = 1;
    std::uint64_t seed = 0;
    std::size_t points = 0, samples = 0, sets = 0;
    bool orthogonal = false;
    std::string corrupt;

    auto *run = app.add_subcommand("run", "Run the configured experiment and write CSV / JSON results");
    auto *grad = app.add_subcommand("gradcheck", "Compare analytic gradients against finite differences");
    auto *sop = app.add_subcommand("sopcheck", "Monte Carlo check of the secrecy outage calibration");

    for (auto *sub : {run, grad, sop})
    {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed (overrides the config)");
    }
    run->add_option("--out", opts.out, "CSV output path (overrides the config)");
    auto *o_trials = run->add_option("--trials", trials, "Trials per sweep value")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    auto *o_log = run->add_option("--log-every", log_every, "Trajectory logging period (0 = off)");

    grad->add_option("--points", points, "Random points to check");
    grad->add_option("--corrupt", corrupt, "Sign-flip one gradient family (self-test)")->group("");
    sop->add_option("--samples", samples, "Monte Carlo draws per user");
    sop->add_option("--sets", sets, "Random beamformer sets");
    sop->add_flag("--orthogonal", orthogonal, "Draw mutually orthogonal beamformers");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    auto seed_given = [&](CLI::App *sub) { return sub->count("--seed") > 0; };

    try
    {
        const ExperimentConfig cfg = io::load_experiment(config_path);
        if (*run)
        {
            if (seed_given(run))
                opts.seed = seed;
            if (*o_trials)
                opts.trials = trials;
            if (*o_log)
                opts.log_every = log_every;
            opts.threads = threads;
            const auto rep = cmd_run(cfg, opts, std::cerr);
            std::cout << "wrote " << rep.csv_path << " and " << rep.summary_path << '\n';
            return exit_ok;
        }
        if (*grad)
        {
            const auto rep = cmd_gradcheck(cfg, points ? points : cfg.gradcheck_points,
                                           seed_given(grad) ? seed : cfg.seed, corrupt);
            return report_gradcheck(rep);
        }
        const auto rep = cmd_sopcheck(cfg, samples ? samples : cfg.sopcheck_samples, sets ? sets : cfg.sopcheck_sets,
                                      seed_given(sop) ? seed : cfg.seed, orthogonal || cfg.sopcheck_orthogonal);
        return report_sopcheck(rep);
    }
    catch (const parse_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const numeric_error &e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (const dimension_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::domain_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
