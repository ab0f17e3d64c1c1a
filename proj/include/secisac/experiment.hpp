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

#ifndef SECISAC_EXPERIMENT_HPP
#define SECISAC_EXPERIMENT_HPP

// Experiment driver behind the command-line tool: config parsing, Monte
// Carlo sweeps over random drops, CSV / JSON output, and the gradient and
// outage self-checks.

#include "secisac/beamformer.hpp"
#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/rates.hpp"
#include "secisac/rng.hpp"
#include "secisac/scenario.hpp"
#include "secisac/sensing.hpp"
#include "secisac/solver.hpp"
#include "secisac/sop.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace secisac
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_config = 1,
    exit_verification = 2,
    exit_numeric = 3
};

struct Sweep
{
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentConfig
{
    GeometryConfig geometry;
    ProblemSizes sizes{8, 3, 3, 2};
    SensingMetric metric = SinrMetric{10.0};
    std::size_t pattern_angles = 181; // default beampattern, used when none is listed
    double pattern_width_deg = 10.0;
    SolverConfig solver;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::optional<Sweep> sweep;
    std::string output_path = "results.csv";

    std::size_t gradcheck_points = 20;
    std::size_t sopcheck_samples = 100000;
    std::size_t sopcheck_sets = 10;
    bool sopcheck_orthogonal = false;
};

inline const std::vector<std::string> &sweep_parameters()
{
    static const std::vector<std::string> names{"gamma_threshold_db", "gamma_mse",        "phi",     "p_fa",
                                                "delta",              "power_budget_dbm", "n_antennas", "n_users",
                                                "n_eves",             "n_scatterers"};
    return names;
}

// ---------------------------------------------------------------------------
// JSON

namespace io
{

inline SensingMetric metric_from_json(const json &j, ExperimentConfig *cfg = nullptr,
                                      const std::string &path = "metric")
{
    const auto kind = field(j, "kind", path);
    if (!kind.is_string())
        throw parse_error("parse error at '" + path + ".kind': expected a string");
    const std::string k = kind.get<std::string>();
    SensingMetric m;
    if (k == "sinr")
    {
        SinrMetric s;
        if (j.contains("gamma_threshold_db"))
            s.gamma_threshold = db_to_linear(as_double(j["gamma_threshold_db"], path + ".gamma_threshold_db"));
        else
            s.gamma_threshold = as_double(field(j, "gamma_threshold", path), path + ".gamma_threshold");
        m = s;
    }
    else if (k == "beampattern")
    {
        BeampatternMetric b;
        b.gamma_mse = as_double(field(j, "gamma_mse", path), path + ".gamma_mse");
        if (j.contains("desired"))
        {
            const auto &d = j["desired"];
            if (!d.is_array())
                throw parse_error("parse error at '" + path + ".desired': expected [[theta_deg, level], ...]");
            for (std::size_t t = 0; t < d.size(); ++t)
            {
                const auto p = as_doubles(d[t], path + ".desired[" + std::to_string(t) + "]");
                if (p.size() != 2)
                    throw parse_error("parse error at '" + path + ".desired[" + std::to_string(t) +
                                      "]': expected [theta_deg, level]");
                b.desired.push_back({p[0] * std::numbers::pi / 180.0, p[1]});
            }
        }
        if (cfg)
        {
            if (j.contains("n_angles"))
                cfg->pattern_angles = as_count(j["n_angles"], path + ".n_angles");
            if (j.contains("width_deg"))
                cfg->pattern_width_deg = as_double(j["width_deg"], path + ".width_deg");
        }
        m = b;
    }
    else if (k == "detection")
    {
        DetectionMetric d;
        d.p_fa = as_double(field(j, "p_fa", path), path + ".p_fa");
        d.phi = as_double(field(j, "phi", path), path + ".phi");
        m = d;
    }
    else if (k == "mutual_info")
    {
        m = MutualInfoMetric{as_double(field(j, "delta", path), path + ".delta")};
    }
    else
    {
        throw parse_error("parse error at '" + path + ".kind': unknown metric '" + k +
                          "' (expected sinr, beampattern, detection or mutual_info)");
    }

    // An empty beampattern list means "fill in per scenario"; check the rest.
    SensingMetric probe = m;
    if (auto *b = std::get_if<BeampatternMetric>(&probe); b && b->desired.empty())
        b->desired.push_back({0.0, 0.0});
    try
    {
        validate_metric(probe);
    }
    catch (const domain_error &e)
    {
        throw parse_error("invalid '" + path + "': " + e.what());
    }
    return m;
}

inline json metric_to_json(const SensingMetric &m)
{
    return std::visit(
        [](const auto &x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SinrMetric>)
                return {{"kind", "sinr"}, {"gamma_threshold", x.gamma_threshold}};
            else if constexpr (std::is_same_v<T, BeampatternMetric>)
            {
                json d = json::array();
                for (const auto &s : x.desired)
                    d.push_back({s.theta * 180.0 / std::numbers::pi, s.level});
                return {{"kind", "beampattern"}, {"gamma_mse", x.gamma_mse}, {"desired", d}};
            }
            else if constexpr (std::is_same_v<T, DetectionMetric>)
                return {{"kind", "detection"}, {"p_fa", x.p_fa}, {"phi", x.phi}};
            else
                return {{"kind", "mutual_info"}, {"delta", x.delta}};
        },
        m);
}

inline SolverConfig solver_from_json(const json &j, const std::string &path = "solver")
{
    SolverConfig c;
    if (!j.is_object())
        throw parse_error("parse error at '" + path + "': expected an object");
    if (j.contains("max_iters"))
        c.max_iters = as_count(j["max_iters"], path + ".max_iters");
    if (j.contains("log_every"))
        c.log_every = as_count(j["log_every"], path + ".log_every");
    if (j.contains("tol_bisect"))
        c.tol_bisect = as_double(j["tol_bisect"], path + ".tol_bisect");
    if (j.contains("init_fill"))
        c.init_fill = as_double(j["init_fill"], path + ".init_fill");
    auto flag = [&](const char *key, bool &dst) {
        if (!j.contains(key))
            return;
        if (!j[key].is_boolean())
            throw parse_error("parse error at '" + path + "." + key + "': expected true or false");
        dst = j[key].get<bool>();
    };
    flag("regularize", c.regularize);
    flag("pin_artificial", c.pin_artificial);
    flag("normalize", c.normalize);
    if (j.contains("objective"))
    {
        const auto &o = j["objective"];
        if (o.is_string() && o.get<std::string>() == "worst_user")
            c.objective = Objective::worst_user();
        else if (o.is_object() && o.contains("weights"))
            c.objective = Objective::weighted(as_doubles(o["weights"], path + ".objective.weights"));
        else
            throw parse_error("parse error at '" + path +
                              ".objective': expected \"worst_user\" or {\"weights\": [...]}");
    }
    if (j.contains("schedules"))
    {
        const auto &s = j["schedules"];
        const std::string sp = path + ".schedules";
        if (!s.is_object())
            throw parse_error("parse error at '" + sp + "': expected an object");
        if (s.contains("lambda_scale"))
            c.schedules.lambda_scale = as_double(s["lambda_scale"], sp + ".lambda_scale");
        if (s.contains("beta_scale"))
            c.schedules.beta_scale = as_double(s["beta_scale"], sp + ".beta_scale");
        if (s.contains("alpha_scale"))
            c.schedules.alpha_scale = as_double(s["alpha_scale"], sp + ".alpha_scale");
        if (s.contains("c_cap_base"))
            c.schedules.c_cap_base = as_double(s["c_cap_base"], sp + ".c_cap_base");
    }
    return c;
}

inline ExperimentConfig experiment_from_json(const json &j)
{
    if (!j.is_object())
        throw parse_error("parse error: config root must be an object");
    ExperimentConfig c;
    if (j.contains("geometry"))
        c.geometry = geometry_from_json(j["geometry"]);
    {
        const auto &s = field(j, "sizes", "");
        c.sizes.n_antennas = as_count(field(s, "n_antennas", "sizes"), "sizes.n_antennas");
        c.sizes.n_users = as_count(field(s, "n_users", "sizes"), "sizes.n_users");
        c.sizes.n_eves = as_count(field(s, "n_eves", "sizes"), "sizes.n_eves");
        c.sizes.n_scatterers = as_count(field(s, "n_scatterers", "sizes"), "sizes.n_scatterers");
        if (c.sizes.n_antennas == 0 || c.sizes.n_users == 0)
            throw parse_error("invalid 'sizes': n_antennas and n_users must be >= 1");
    }
    c.metric = metric_from_json(field(j, "metric", ""), &c);
    if (j.contains("solver"))
        c.solver = solver_from_json(j["solver"]);
    if (j.contains("trials"))
        c.trials = as_count(j["trials"], "trials");
    if (c.trials < 1)
        throw parse_error("invalid 'trials': must be >= 1");
    if (j.contains("seed"))
    {
        if (!j["seed"].is_number_integer())
            throw parse_error("parse error at 'seed': expected an integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_path"))
    {
        if (!j["output_path"].is_string())
            throw parse_error("parse error at 'output_path': expected a string");
        c.output_path = j["output_path"].get<std::string>();
    }
    if (j.contains("sweep"))
    {
        const auto &s = j["sweep"];
        Sweep sw;
        const auto &p = field(s, "parameter", "sweep");
        if (!p.is_string())
            throw parse_error("parse error at 'sweep.parameter': expected a string");
        sw.parameter = p.get<std::string>();
        const auto &names = sweep_parameters();
        if (std::find(names.begin(), names.end(), sw.parameter) == names.end())
            throw parse_error("invalid 'sweep.parameter': unknown parameter '" + sw.parameter + "'");
        sw.values = as_doubles(field(s, "values", "sweep"), "sweep.values");
        if (sw.values.empty())
            throw parse_error("invalid 'sweep.values': need at least one value");
        c.sweep = sw;
    }
    if (j.contains("gradcheck"))
    {
        const auto &g = j["gradcheck"];
        if (g.contains("n_points"))
            c.gradcheck_points = as_count(g["n_points"], "gradcheck.n_points");
    }
    if (j.contains("sopcheck"))
    {
        const auto &g = j["sopcheck"];
        if (g.contains("n_samples"))
            c.sopcheck_samples = as_count(g["n_samples"], "sopcheck.n_samples");
        if (g.contains("n_sets"))
            c.sopcheck_sets = as_count(g["n_sets"], "sopcheck.n_sets");
        if (g.contains("orthogonal"))
            c.sopcheck_orthogonal = g["orthogonal"].get<bool>();
    }
    try
    {
        c.solver.validate(c.sizes.n_users);
    }
    catch (const std::exception &e)
    {
        throw parse_error(std::string("invalid 'solver': ") + e.what());
    }
    return c;
}

inline ExperimentConfig load_experiment(const std::string &path) { return experiment_from_json(read_file(path)); }

} // namespace io

// ---------------------------------------------------------------------------
// Sweeps

// Copy of the config with one sweep parameter set. Throws parse_error when the
// parameter does not apply to the configured metric or the value is invalid.
inline ExperimentConfig apply_sweep_value(const ExperimentConfig &base, const std::string &name, double value)
{
    ExperimentConfig c = base;
    auto count = [&](std::size_t &dst, std::size_t min) {
        if (!(value >= static_cast<double>(min)) || value != std::floor(value))
            throw parse_error("invalid sweep value " + std::to_string(value) + " for '" + name + "'");
        dst = static_cast<std::size_t>(value);
    };
    auto wrong_metric = [&]() {
        return parse_error("sweep parameter '" + name + "' does not apply to the " + metric_name(c.metric) +
                           " metric");
    };
    if (name == "gamma_threshold_db")
    {
        auto *m = std::get_if<SinrMetric>(&c.metric);
        if (!m)
            throw wrong_metric();
        m->gamma_threshold = db_to_linear(value);
    }
    else if (name == "gamma_mse")
    {
        auto *m = std::get_if<BeampatternMetric>(&c.metric);
        if (!m)
            throw wrong_metric();
        m->gamma_mse = value;
    }
    else if (name == "phi" || name == "p_fa")
    {
        auto *m = std::get_if<DetectionMetric>(&c.metric);
        if (!m)
            throw wrong_metric();
        (name == "phi" ? m->phi : m->p_fa) = value;
    }
    else if (name == "delta")
    {
        auto *m = std::get_if<MutualInfoMetric>(&c.metric);
        if (!m)
            throw wrong_metric();
        m->delta = value;
    }
    else if (name == "power_budget_dbm")
        c.geometry.power_budget_dbm = value;
    else if (name == "n_antennas")
        count(c.sizes.n_antennas, 1);
    else if (name == "n_users")
        count(c.sizes.n_users, 1);
    else if (name == "n_eves")
        count(c.sizes.n_eves, 0);
    else if (name == "n_scatterers")
        count(c.sizes.n_scatterers, 0);
    else
        throw parse_error("unknown sweep parameter '" + name + "'");

    SensingMetric probe = c.metric;
    if (auto *b = std::get_if<BeampatternMetric>(&probe); b && b->desired.empty())
        b->desired.push_back({0.0, 0.0});
    try
    {
        validate_metric(probe);
        c.geometry.validate();
        if (c.solver.objective.kind == Objective::Kind::weighted && c.solver.objective.weights.size() != c.sizes.n_users)
            throw domain_error("weight count does not match n_users");
    }
    catch (const std::exception &e)
    {
        throw parse_error("invalid sweep value " + std::to_string(value) + " for '" + name + "': " + e.what());
    }
    return c;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return seed ^ static_cast<std::uint64_t>(trial); }

// Scenario and fully resolved metric for one trial.
struct TrialProblem
{
    Scenario scenario;
    SensingMetric metric;
};

inline TrialProblem make_trial_problem(const ExperimentConfig &c, std::uint64_t seed)
{
    GeometryConfig g = c.geometry;
    g.seed = seed;
    TrialProblem p{generate_scenario(g, c.sizes), c.metric};
    if (auto *b = std::get_if<BeampatternMetric>(&p.metric); b && b->desired.empty())
        b->desired = default_beampattern(p.scenario, c.pattern_angles, c.pattern_width_deg);
    return p;
}

struct TrialResult
{
    double sweep_value = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    SolverResult solver;
    double wall_time_s = 0.0;
};

inline TrialResult run_trial(const ExperimentConfig &c, double sweep_value, std::size_t trial)
{
    TrialResult r;
    r.sweep_value = sweep_value;
    r.trial = trial;
    r.seed = trial_seed(c.seed, trial);
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = make_trial_problem(c, r.seed);
    SolverConfig sc = c.solver;
    sc.seed = r.seed;
    r.solver = run(p.scenario, p.metric, sc);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// Runs f(0..n-1) on a worker pool. Results land in their own slots, so the
// output order never depends on scheduling. The first exception is
// rethrown after all workers stop; `done` marks the tasks that finished.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, F &&f, std::vector<char> *done = nullptr)
{
    std::vector<T> out(n);
    std::vector<char> finished(n, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;)
        {
            if (stop.load())
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                out[i] = f(i);
                finished[i] = 1;
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                stop.store(true);
            }
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (done)
        *done = finished;
    if (error)
        std::rethrow_exception(error);
    return out;
}

struct SweepPointSummary
{
    double value = 0.0;
    std::size_t trials = 0;
    std::size_t feasible = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
};

inline double median_of(std::vector<double> x)
{
    if (x.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return (n % 2) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// Statistics over the trials that found a sensing-feasible point.
inline SweepPointSummary summarize(double value, const std::vector<TrialResult> &rows)
{
    SweepPointSummary s;
    s.value = value;
    std::vector<double> obj;
    for (const auto &r : rows)
        if (r.sweep_value == value)
        {
            ++s.trials;
            if (r.solver.feasible)
                obj.push_back(r.solver.best_obj);
        }
    s.feasible = obj.size();
    if (obj.empty())
        return s;
    double sum = 0.0;
    for (double v : obj)
        sum += v;
    s.mean = sum / static_cast<double>(obj.size());
    double ss = 0.0;
    for (double v : obj)
        ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = obj.size() > 1 ? std::sqrt(ss / static_cast<double>(obj.size() - 1) / static_cast<double>(obj.size()))
                               : 0.0;
    s.median = median_of(obj);
    return s;
}

inline const char *csv_header() { return "sweep_value,trial,seed,objective,sensing,iterations,wall_time_s"; }

inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_row(const TrialResult &r)
{
    std::ostringstream os;
    os << format_double(r.sweep_value) << ',' << r.trial << ',' << r.seed << ','
       << format_double(r.solver.feasible ? r.solver.best_obj : -std::numeric_limits<double>::infinity()) << ','
       << format_double(r.solver.feasible ? r.solver.best_sensing : r.solver.final_sensing) << ','
       << r.solver.iterations << ',' << std::setprecision(6) << r.wall_time_s;
    return os.str();
}

inline std::string sibling_path(const std::string &path, const std::string &suffix)
{
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                                 ? path.substr(0, dot)
                                 : path;
    return stem + suffix;
}

struct RunOptions
{
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> log_every;
    std::size_t threads = 1;
};

struct RunReport
{
    std::vector<TrialResult> rows;
    std::vector<SweepPointSummary> summary;
    std::string csv_path;
    std::string summary_path;
};

inline ExperimentConfig with_overrides(ExperimentConfig c, const RunOptions &o)
{
    if (o.out)
        c.output_path = *o.out;
    if (o.trials)
    {
        if (*o.trials < 1)
            throw parse_error("invalid --trials: must be >= 1");
        c.trials = *o.trials;
    }
    if (o.seed)
        c.seed = *o.seed;
    if (o.log_every)
        c.solver.log_every = *o.log_every;
    return c;
}

// Every (sweep value, trial) pair, CSV rows in that order, plus a JSON
// summary next to the CSV. Rows that finished are flushed even when a
// later trial fails.
inline RunReport cmd_run(const ExperimentConfig &base, const RunOptions &opts, std::ostream &log)
{
    const ExperimentConfig cfg = with_overrides(base, opts);
    // Without a sweep every row carries sweep value 0.
    std::vector<double> values{0.0};
    std::vector<ExperimentConfig> per_value{cfg};
    if (cfg.sweep)
    {
        values = cfg.sweep->values;
        per_value.clear();
        for (double v : values)
            per_value.push_back(apply_sweep_value(cfg, cfg.sweep->parameter, v));
    }

    const std::size_t n_tasks = values.size() * cfg.trials;
    std::vector<char> done;
    std::vector<TrialResult> rows;
    std::exception_ptr failure;
    try
    {
        rows = parallel_map<TrialResult>(
            n_tasks, opts.threads,
            [&](std::size_t t) {
                const std::size_t vi = t / cfg.trials;
                return run_trial(per_value[vi], values[vi], t % cfg.trials);
            },
            &done);
    }
    catch (...)
    {
        failure = std::current_exception();
    }

    RunReport rep;
    rep.csv_path = cfg.output_path;
    rep.summary_path = sibling_path(cfg.output_path, ".summary.json");
    {
        std::ofstream csv(rep.csv_path);
        if (!csv)
            throw parse_error("cannot write '" + rep.csv_path + "'");
        csv << csv_header() << '\n';
        for (std::size_t t = 0; t < n_tasks; ++t)
        {
            if (failure && (t >= done.size() || !done[t]))
                continue;
            csv << csv_row(rows[t]) << '\n';
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    if (cfg.solver.log_every > 0)
    {
        std::ofstream tr(sibling_path(cfg.output_path, ".trajectory.csv"));
        tr << "sweep_value,trial,k,objective,sensing,c,stationarity,best_obj,wall_time_s\n";
        for (const auto &r : rows)
            for (const auto &rec : r.solver.trajectory)
                tr << format_double(r.sweep_value) << ',' << r.trial << ',' << rec.k << ','
                   << format_double(rec.objective) << ',' << format_double(rec.sensing) << ','
                   << format_double(rec.c) << ',' << format_double(rec.stationarity) << ','
                   << format_double(rec.best_obj) << ',' << std::setprecision(6) << rec.wall_time_s << '\n';
    }

    nlohmann::json js;
    js["metric"] = metric_name(cfg.metric);
    js["objective"] = cfg.solver.objective.kind == Objective::Kind::worst_user ? "worst_user" : "weighted";
    js["trials"] = cfg.trials;
    js["seed"] = cfg.seed;
    js["sweep_parameter"] = cfg.sweep ? cfg.sweep->parameter : "";
    js["points"] = nlohmann::json::array();
    for (double v : values)
    {
        const auto s = summarize(v, rows);
        rep.summary.push_back(s);
        auto num = [](double x) -> nlohmann::json {
            if (std::isfinite(x))
                return x;
            return nullptr;
        };
        js["points"].push_back({{"value", cfg.sweep ? num(s.value) : nlohmann::json(nullptr)},
                                {"trials", s.trials},
                                {"feasible", s.feasible},
                                {"mean", num(s.mean)},
                                {"stderr", num(s.stderr_)},
                                {"median", num(s.median)}});
    }
    io::write_file(js, rep.summary_path);
    rep.rows = std::move(rows);
    for (const auto &s : rep.summary)
        log << "value " << format_double(s.value) << ": " << s.feasible << "/" << s.trials
            << " feasible, mean " << format_double(s.mean) << ", median " << format_double(s.median) << '\n';
    return rep;
}

// ---------------------------------------------------------------------------
// Gradient check

struct GradFamily
{
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checks = 0;
};

struct GradCheckReport
{
    std::vector<GradFamily> families;
    double tolerance = 1e-4;
    bool passed() const
    {
        for (const auto &f : families)
            if (!(f.max_rel_error <= tolerance))
                return false;
        return true;
    }
};

inline const std::vector<std::string> &grad_family_names()
{
    static const std::vector<std::string> names{"rate",          "redundancy",       "sinr_w",     "sinr_v",
                                                "beampattern_w", "detection_w",      "mutual_info_w"};
    return names;
}

// Random point inside the ball together with a random unit filter.
inline std::pair<BeamformerSet, CVec> random_point(const Scenario &s, std::uint64_t seed, std::size_t index)
{
    CounterRng rng(seed, "gradcheck-point", index);
    const double fill = rng.uniform(0.3, 0.9);
    auto w = random_beamformers(s.n_antennas, s.n_users, s.power_budget, fill, rng);
    CVec v(s.n_antennas);
    for (auto &z : v)
        z = rng.complex_normal(1.0);
    return {w, project_unit_sphere(v)};
}

// Analytic vs central differences for every gradient family. `corrupt`
// names a family whose analytic gradient is sign-flipped (harness self-test).
inline GradCheckReport cmd_gradcheck(const ExperimentConfig &cfg, std::size_t n_points, std::uint64_t seed,
                                     const std::string &corrupt = "")
{
    if (!corrupt.empty())
    {
        const auto &names = grad_family_names();
        if (std::find(names.begin(), names.end(), corrupt) == names.end())
            throw parse_error("unknown gradient family '" + corrupt + "'");
    }
    const auto prob = make_trial_problem(cfg, seed);
    const Scenario &s = prob.scenario;
    const double h = 1e-6 * std::sqrt(s.power_budget);
    const auto lengths = BeamformerSet::zeros(s.n_antennas, s.n_users).block_lengths();

    SinrMetric sinr;
    BeampatternMetric bp{0.1, default_beampattern(s, cfg.pattern_angles, cfg.pattern_width_deg)};
    DetectionMetric det;
    MutualInfoMetric mi;
    if (auto *m = std::get_if<SinrMetric>(&prob.metric))
        sinr = *m;
    if (auto *m = std::get_if<BeampatternMetric>(&prob.metric))
        bp = *m;
    if (auto *m = std::get_if<DetectionMetric>(&prob.metric))
        det = *m;
    if (auto *m = std::get_if<MutualInfoMetric>(&prob.metric))
        mi = *m;

    GradCheckReport rep;
    std::vector<GradFamily> fam;
    for (const auto &n : grad_family_names())
        fam.push_back({n, 0.0, 0});
    auto record = [&](std::size_t idx, std::vector<double> analytic, const std::vector<double> &fd) {
        if (fam[idx].name == corrupt)
            for (auto &x : analytic)
                x = -x;
        fam[idx].max_rel_error = std::max(fam[idx].max_rel_error, relative_error(analytic, fd));
        ++fam[idx].checks;
    };
    auto w_of = [&](std::span<const double> x) { return BeamformerSet(unflatten(x, lengths)); };

    for (std::size_t p = 0; p < n_points; ++p)
    {
        const auto [w, v] = random_point(s, seed, p);
        const auto x = flatten(std::span<const CVec>(w.vectors));

        for (std::size_t i = 0; i < s.n_users; ++i)
        {
            const auto fd = finite_diff_gradient(
                [&](std::span<const double> z) { return achievable_rate(w_of(z), i, s); }, x, h);
            const auto g = rate_gradient(w, i, s);
            record(0, flatten(std::span<const CVec>(g)), fd);

            if (s.n_eves > 0 && s.outage_targets[i] < 1.0)
            {
                const auto fdd = finite_diff_gradient(
                    [&](std::span<const double> z) { return solve_redundancy_rate(w_of(z), i, s, 0.0); }, x, h);
                const auto gd = redundancy_gradient(w, i, s, solve_redundancy_rate(w, i, s, 0.0));
                record(1, flatten(std::span<const CVec>(gd)), fdd);
            }
        }

        const SensingMetric m_sinr = sinr, m_bp = bp, m_det = det, m_mi = mi;
        auto check_w = [&](std::size_t idx, const SensingMetric &m, const AuxVar &aux) {
            const auto fd = finite_diff_gradient(
                [&](std::span<const double> z) { return metric_value(m, w_of(z), aux, s); }, x, h);
            const auto g = metric_grad_w(m, w, aux, s);
            record(idx, flatten(std::span<const CVec>(g)), fd);
        };
        check_w(2, m_sinr, v);
        check_w(4, m_bp, std::nullopt);
        check_w(5, m_det, std::nullopt);
        check_w(6, m_mi, std::nullopt);

        const auto xv = flatten(std::span<const cplx>(v));
        const auto fdv = finite_diff_gradient(
            [&](std::span<const double> z) {
                const std::vector<std::size_t> len{s.n_antennas};
                return metric_value(m_sinr, w, AuxVar(unflatten(z, len)[0]), s);
            },
            xv, 1e-6);
        record(3, flatten(std::span<const cplx>(metric_grad_v(m_sinr, w, v, s))), fdv);
    }
    rep.families = fam;
    return rep;
}

// ---------------------------------------------------------------------------
// Outage check

struct SopRow
{
    std::size_t set = 0;
    std::size_t user = 0;
    double eta = 0.0;
    double redundancy = 0.0;
    double empirical = 0.0;              // dominant eavesdropper
    std::vector<double> per_eavesdropper;
    double tolerance = 0.0;
    bool checked = true; // false for eta = 1
    bool passed = true;
};

struct SopCheckReport
{
    std::vector<SopRow> rows;
    std::size_t dominant = 0;
    bool passed() const
    {
        for (const auto &r : rows)
            if (r.checked && !r.passed)
                return false;
        return true;
    }
};

// Mutually orthogonal beams with random powers, total fill * budget.
inline BeamformerSet random_orthogonal_beamformers(std::size_t n, std::size_t n_users, double budget, double fill,
                                                   CounterRng &rng)
{
    if (n_users + 1 > n)
        throw dimension_error("orthogonal beamformers need N >= I + 1");
    auto w = BeamformerSet::zeros(n, n_users);
    for (std::size_t l = 0; l < w.count(); ++l)
    {
        for (auto &z : w[l])
            z = rng.complex_normal(1.0);
        for (std::size_t q = 0; q < l; ++q)
        {
            const cplx proj = dot_h(w[q], w[l]);
            axpy(-proj, w[q], w[l]);
        }
        const double nl = norm(w[l]);
        for (auto &z : w[l])
            z /= nl;
    }
    for (auto &v : w.vectors)
    {
        const double a = std::sqrt(rng.uniform(0.1, 1.0));
        for (auto &z : v)
            z *= a;
    }
    const double scale = std::sqrt(fill * budget / w.total_power());
    for (auto &v : w.vectors)
        for (auto &z : v)
            z *= scale;
    return w;
}

inline SopCheckReport cmd_sopcheck(const ExperimentConfig &cfg, std::size_t n_samples, std::size_t n_sets,
                                   std::uint64_t seed, bool orthogonal)
{
    if (n_samples < 10000)
        throw parse_error("sopcheck: need at least 10000 samples");
    const auto prob = make_trial_problem(cfg, seed);
    const Scenario &s = prob.scenario;
    if (s.n_eves == 0)
        throw parse_error("sopcheck: the scenario has no eavesdroppers");

    SopCheckReport rep;
    rep.dominant = static_cast<std::size_t>(std::max_element(s.eve_snr.begin(), s.eve_snr.end()) - s.eve_snr.begin());
    for (std::size_t k = 0; k < n_sets; ++k)
    {
        CounterRng rng(seed, "sopcheck-set", k);
        const auto w = orthogonal ? random_orthogonal_beamformers(s.n_antennas, s.n_users, s.power_budget, 0.9, rng)
                                  : random_beamformers(s.n_antennas, s.n_users, s.power_budget, 0.9, rng);
        for (std::size_t i = 0; i < s.n_users; ++i)
        {
            SopRow row;
            row.set = k;
            row.user = i;
            row.eta = s.outage_targets[i];
            row.redundancy = solve_redundancy_rate(w, i, s);
            const auto est = monte_carlo_sop(w, row.redundancy, i, s, n_samples,
                                             CounterRng::mix(seed + 0x51ULL * (k * s.n_users + i + 1)));
            row.per_eavesdropper = est.per_eavesdropper;
            row.empirical = est.per_eavesdropper[rep.dominant];
            row.tolerance = 4.0 * std::sqrt(row.eta * (1.0 - row.eta) / static_cast<double>(n_samples));
            row.checked = row.eta < 1.0;
            row.passed = !row.checked || std::abs(row.empirical - row.eta) <= row.tolerance;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

} // namespace secisac

#endif
