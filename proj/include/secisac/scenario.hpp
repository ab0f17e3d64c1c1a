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

#ifndef SECISAC_SCENARIO_HPP
#define SECISAC_SCENARIO_HPP

#include "secisac/errors.hpp"
#include "secisac/numerics.hpp"
#include "secisac/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace secisac
{

// Round-trip echo path: A_m = beta a(theta) a(theta)^H. Index 0 of a
// scenario's path list is the sensing target, the rest are scatterers.
struct SensingPath
{
    cplx beta{0.0, 0.0};
    double theta = 0.0; // rad

    bool operator==(const SensingPath &) const = default;
};

struct ProblemSizes
{
    std::size_t n_antennas = 0; // N
    std::size_t n_users = 0;    // I
    std::size_t n_eves = 0;     // J
    std::size_t n_scatterers = 0; // M

    bool operator==(const ProblemSizes &) const = default;
};

// One immutable problem instance. Powers in watts, channels as linear
// amplitudes, eve_snr is rho_j^2 / varsigma_j^2 (linear).
struct Scenario
{
    std::size_t n_antennas = 0;
    std::size_t n_users = 0;
    std::size_t n_eves = 0;
    std::size_t n_scatterers = 0;
    double element_spacing = 0.5; // antenna spacing over wavelength

    std::vector<CVec> user_channels;
    std::vector<double> eve_snr;
    std::vector<SensingPath> sensing_channels; // size M + 1
    std::vector<double> noise_user;
    double noise_bs = 0.0;
    double power_budget = 0.0;
    std::vector<double> outage_targets;

    bool operator==(const Scenario &) const = default;

    ProblemSizes sizes() const { return {n_antennas, n_users, n_eves, n_scatterers}; }

    // Largest statistical SNR over all eavesdroppers, 0 when there are none.
    double max_eve_snr() const
    {
        double m = 0.0;
        for (double s : eve_snr)
            m = std::max(m, s);
        return m;
    }

    RankOneChannel path(std::size_t m) const
    {
        const auto &p = sensing_channels.at(m);
        return {p.beta, steering_vector(p.theta, n_antennas, element_spacing)};
    }

    std::vector<RankOneChannel> paths() const
    {
        std::vector<RankOneChannel> out;
        out.reserve(sensing_channels.size());
        for (std::size_t m = 0; m < sensing_channels.size(); ++m)
            out.push_back(path(m));
        return out;
    }

    void validate() const
    {
        if (n_antennas == 0)
            throw dimension_error("scenario: n_antennas must be >= 1");
        if (n_users == 0)
            throw dimension_error("scenario: n_users must be >= 1");
        if (user_channels.size() != n_users)
            throw dimension_error("scenario: expected " + std::to_string(n_users) + " user channels, got " +
                                  std::to_string(user_channels.size()));
        for (std::size_t i = 0; i < user_channels.size(); ++i)
            if (user_channels[i].size() != n_antennas)
                throw dimension_error("scenario: user_channels[" + std::to_string(i) + "] has length " +
                                      std::to_string(user_channels[i].size()) + ", expected " +
                                      std::to_string(n_antennas));
        if (eve_snr.size() != n_eves)
            throw dimension_error("scenario: eve_snr has " + std::to_string(eve_snr.size()) + " entries, expected " +
                                  std::to_string(n_eves));
        for (std::size_t j = 0; j < eve_snr.size(); ++j)
            if (!(eve_snr[j] > 0.0) || !std::isfinite(eve_snr[j]))
                throw domain_error("scenario: eve_snr[" + std::to_string(j) + "] must be positive");
        if (sensing_channels.size() != n_scatterers + 1)
            throw dimension_error("scenario: expected " + std::to_string(n_scatterers + 1) +
                                  " sensing channels (target + scatterers), got " +
                                  std::to_string(sensing_channels.size()));
        if (noise_user.size() != n_users)
            throw dimension_error("scenario: noise_user has " + std::to_string(noise_user.size()) +
                                  " entries, expected " + std::to_string(n_users));
        for (double s : noise_user)
            if (!(s > 0.0))
                throw domain_error("scenario: noise_user entries must be positive");
        if (!(noise_bs > 0.0))
            throw domain_error("scenario: noise_bs must be positive");
        if (!(power_budget > 0.0))
            throw domain_error("scenario: power_budget must be positive");
        if (outage_targets.size() != n_users)
            throw dimension_error("scenario: outage_targets has " + std::to_string(outage_targets.size()) +
                                  " entries, expected " + std::to_string(n_users));
        for (double e : outage_targets)
            if (!(e > 0.0 && e <= 1.0))
                throw domain_error("scenario: outage targets must lie in (0, 1]");
        if (!(element_spacing > 0.0))
            throw domain_error("scenario: element_spacing must be positive");
    }
};

// Dense rank-one sensing channel beta a a^H.
inline CMat sensing_channel(cplx beta, double theta, std::size_t n, double zeta = 0.5)
{
    return RankOneChannel{beta, steering_vector(theta, n, zeta)}.dense();
}

// Parameters of the random drop. Defaults follow the reference simulation
// setup: 100 m disk, 3.5 GHz, 10 MHz, -96 dBm/Hz, L0 = -30 dB at 1 m,
// exponent 2, Rician factor 5, 20 dBm budget, outage target 0.1.
struct GeometryConfig
{
    double area_radius = 100.0;    // m
    double carrier = 3.5e9;        // Hz
    double bandwidth = 10e6;       // Hz
    double noise_psd = -96.0;      // dBm/Hz
    double pathloss_ref = -30.0;   // dB at 1 m
    double pathloss_exp = 2.0;
    double rician_k = 5.0;
    double power_budget_dbm = 20.0;
    double outage_target = 0.1;
    double element_spacing = 0.5;
    double scatter_loss_ref = 20.0; // dB, beta_m(dB) = ref + 20 log10(d_m) is a loss
    double target_rcs_db = 0.0;     // extra echo gain of the target path only
    double eve_guard_radius = 0.0;  // m, eavesdroppers are dropped outside this radius
    double min_distance = 1.0;      // m, drops closer than this are pushed out
    std::uint64_t seed = 1;

    bool operator==(const GeometryConfig &) const = default;

    void validate() const
    {
        if (!(area_radius > 0.0) || !(carrier > 0.0) || !(bandwidth > 0.0))
            throw domain_error("geometry: area_radius, carrier and bandwidth must be positive");
        if (!(pathloss_exp > 0.0))
            throw domain_error("geometry: pathloss_exp must be positive");
        if (!(rician_k >= 0.0))
            throw domain_error("geometry: rician_k must be >= 0");
        if (!(outage_target > 0.0 && outage_target <= 1.0))
            throw domain_error("geometry: outage_target must lie in (0, 1]");
        if (!(element_spacing > 0.0))
            throw domain_error("geometry: element_spacing must be positive");
        if (!(min_distance > 0.0) || min_distance > area_radius)
            throw domain_error("geometry: min_distance must lie in (0, area_radius]");
        if (!(eve_guard_radius >= 0.0) || eve_guard_radius >= area_radius)
            throw domain_error("geometry: eve_guard_radius must lie in [0, area_radius)");
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Noise power in watts for a PSD in dBm/Hz over the given bandwidth.
inline double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz)
{
    return dbm_to_watts(psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

// Large-scale power gain L0 (d / 1 m)^-alpha.
inline double pathloss_gain(const GeometryConfig &g, double distance)
{
    return db_to_linear(g.pathloss_ref) * std::pow(distance, -g.pathloss_exp);
}

// Round-trip echo amplitude from beta(dB) = ref + 20 log10(d), read as a loss.
inline double echo_amplitude(const GeometryConfig &g, double distance)
{
    const double loss_db = g.scatter_loss_ref + 20.0 * std::log10(distance);
    return std::pow(10.0, -loss_db / 20.0);
}

namespace detail
{
struct Drop
{
    double distance;
    double angle; // azimuth in [0, 2pi)
};

// Uniform over the annulus inner <= r <= area_radius (inner = 0: the disk).
inline Drop drop_in_disk(CounterRng &rng, const GeometryConfig &g, double inner = 0.0)
{
    const double r2 = inner * inner + (g.area_radius * g.area_radius - inner * inner) * rng.uniform();
    const double r = std::sqrt(r2);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {std::max(r, g.min_distance), phi};
}
} // namespace detail

inline Scenario generate_scenario(const GeometryConfig &config, const ProblemSizes &sizes)
{
    config.validate();
    if (sizes.n_antennas == 0 || sizes.n_users == 0)
        throw dimension_error("generate_scenario: N and I must be >= 1");

    Scenario s;
    s.n_antennas = sizes.n_antennas;
    s.n_users = sizes.n_users;
    s.n_eves = sizes.n_eves;
    s.n_scatterers = sizes.n_scatterers;
    s.element_spacing = config.element_spacing;

    const double noise = noise_power_watts(config.noise_psd, config.bandwidth);
    const std::size_t n = sizes.n_antennas;

    const bool pure_los = std::isinf(config.rician_k);
    const double los_w = pure_los ? 1.0 : std::sqrt(config.rician_k / (config.rician_k + 1.0));
    const double nlos_w = pure_los ? 0.0 : std::sqrt(1.0 / (config.rician_k + 1.0));

    CounterRng user_pos(config.seed, "user-position");
    CounterRng user_los(config.seed, "user-los-angle");
    CounterRng user_nlos(config.seed, "user-nlos");
    for (std::size_t i = 0; i < sizes.n_users; ++i)
    {
        const auto drop = detail::drop_in_disk(user_pos, config);
        const double amp = std::sqrt(pathloss_gain(config, drop.distance));
        const double omega = 2.0 * std::numbers::pi * user_los.uniform();
        const CVec los = steering_vector(omega, n, config.element_spacing);
        CVec h(n);
        for (std::size_t k = 0; k < n; ++k)
            h[k] = amp * (los_w * los[k] + nlos_w * user_nlos.complex_normal(1.0));
        s.user_channels.push_back(std::move(h));
        s.noise_user.push_back(noise);
        s.outage_targets.push_back(config.outage_target);
    }

    CounterRng eve_pos(config.seed, "eve-position");
    for (std::size_t j = 0; j < sizes.n_eves; ++j)
    {
        const auto drop = detail::drop_in_disk(eve_pos, config, config.eve_guard_radius);
        s.eve_snr.push_back(pathloss_gain(config, drop.distance) / noise);
    }

    CounterRng sense_pos(config.seed, "sensing-position");
    for (std::size_t m = 0; m <= sizes.n_scatterers; ++m)
    {
        const auto drop = detail::drop_in_disk(sense_pos, config);
        // sin(theta) is all the array sees; fold the azimuth into [-pi/2, pi/2].
        const double theta = std::asin(std::sin(drop.angle));
        double amp = echo_amplitude(config, drop.distance);
        if (m == 0)
            amp *= std::pow(10.0, config.target_rcs_db / 20.0);
        s.sensing_channels.push_back({cplx{amp, 0.0}, theta});
    }

    s.noise_bs = noise;
    s.power_budget = dbm_to_watts(config.power_budget_dbm);
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// File format: JSON tree, complex scalars as [re, im].

namespace io
{
using nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVec &v)
{
    json a = json::array();
    for (const auto &z : v)
        a.push_back(to_json(z));
    return a;
}

// Field access with a dotted path in every diagnostic.
inline const json &field(const json &j, const std::string &key, const std::string &path)
{
    if (!j.is_object())
        throw parse_error("parse error at '" + path + "': expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw parse_error("parse error: missing field '" + (path.empty() ? key : path + "." + key) + "'");
    return *it;
}

inline double as_double(const json &j, const std::string &path)
{
    if (!j.is_number())
        throw parse_error("parse error at '" + path + "': expected a number");
    return j.get<double>();
}

inline std::size_t as_count(const json &j, const std::string &path)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw parse_error("parse error at '" + path + "': expected a non-negative integer");
    return j.get<std::size_t>();
}

inline cplx as_cplx(const json &j, const std::string &path)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw parse_error("parse error at '" + path + "': expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CVec as_cvec(const json &j, const std::string &path)
{
    if (!j.is_array())
        throw parse_error("parse error at '" + path + "': expected an array of [re, im]");
    CVec v;
    for (std::size_t k = 0; k < j.size(); ++k)
        v.push_back(as_cplx(j[k], path + "[" + std::to_string(k) + "]"));
    return v;
}

inline std::vector<double> as_doubles(const json &j, const std::string &path)
{
    if (!j.is_array())
        throw parse_error("parse error at '" + path + "': expected an array of numbers");
    std::vector<double> v;
    for (std::size_t k = 0; k < j.size(); ++k)
        v.push_back(as_double(j[k], path + "[" + std::to_string(k) + "]"));
    return v;
}

template <class T>
T get_or(const json &j, const std::string &key, T fallback)
{
    auto it = j.find(key);
    if (it == j.end())
        return fallback;
    return it->get<T>();
}

// Parse text, reporting line and column on syntax errors.
inline json parse_text(const std::string &text, const std::string &source)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size()); ++k)
        {
            if (text[k] == '\n')
            {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
        throw parse_error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

inline json read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

inline void write_file(const json &j, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw parse_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

inline json scenario_to_json(const Scenario &s)
{
    json j;
    j["units"] = {{"user_channels", "linear amplitude, [re, im]"},
                  {"eve_snr", "linear, rho_j^2 / varsigma_j^2"},
                  {"sensing_channels.beta", "linear round-trip coefficient, [re, im]"},
                  {"sensing_channels.theta", "rad"},
                  {"noise_user", "W"},
                  {"noise_bs", "W"},
                  {"power_budget", "W"},
                  {"outage_targets", "probability"}};
    j["n_antennas"] = s.n_antennas;
    j["n_users"] = s.n_users;
    j["n_eves"] = s.n_eves;
    j["n_scatterers"] = s.n_scatterers;
    j["element_spacing"] = s.element_spacing;
    j["user_channels"] = json::array();
    for (const auto &h : s.user_channels)
        j["user_channels"].push_back(to_json(h));
    j["eve_snr"] = s.eve_snr;
    j["sensing_channels"] = json::array();
    for (const auto &p : s.sensing_channels)
        j["sensing_channels"].push_back({{"beta", to_json(p.beta)}, {"theta", p.theta}});
    j["noise_user"] = s.noise_user;
    j["noise_bs"] = s.noise_bs;
    j["power_budget"] = s.power_budget;
    j["outage_targets"] = s.outage_targets;
    return j;
}

inline Scenario scenario_from_json(const json &j)
{
    Scenario s;
    s.n_antennas = as_count(field(j, "n_antennas", ""), "n_antennas");
    s.n_users = as_count(field(j, "n_users", ""), "n_users");
    s.n_eves = as_count(field(j, "n_eves", ""), "n_eves");
    s.n_scatterers = as_count(field(j, "n_scatterers", ""), "n_scatterers");
    if (j.contains("element_spacing"))
        s.element_spacing = as_double(j["element_spacing"], "element_spacing");
    const auto &hs = field(j, "user_channels", "");
    if (!hs.is_array())
        throw parse_error("parse error at 'user_channels': expected an array");
    for (std::size_t i = 0; i < hs.size(); ++i)
    {
        const std::string path = "user_channels[" + std::to_string(i) + "]";
        CVec h = as_cvec(hs[i], path);
        if (h.size() != s.n_antennas)
            throw dimension_error("dimension error at '" + path + "': length " + std::to_string(h.size()) +
                                  " != n_antennas " + std::to_string(s.n_antennas));
        s.user_channels.push_back(std::move(h));
    }
    s.eve_snr = as_doubles(field(j, "eve_snr", ""), "eve_snr");
    const auto &sc = field(j, "sensing_channels", "");
    if (!sc.is_array())
        throw parse_error("parse error at 'sensing_channels': expected an array");
    for (std::size_t m = 0; m < sc.size(); ++m)
    {
        const std::string path = "sensing_channels[" + std::to_string(m) + "]";
        s.sensing_channels.push_back({as_cplx(field(sc[m], "beta", path), path + ".beta"),
                                      as_double(field(sc[m], "theta", path), path + ".theta")});
    }
    s.noise_user = as_doubles(field(j, "noise_user", ""), "noise_user");
    s.noise_bs = as_double(field(j, "noise_bs", ""), "noise_bs");
    s.power_budget = as_double(field(j, "power_budget", ""), "power_budget");
    s.outage_targets = as_doubles(field(j, "outage_targets", ""), "outage_targets");
    s.validate();
    return s;
}

inline json geometry_to_json(const GeometryConfig &g)
{
    return {{"units",
             {{"area_radius", "m"},
              {"carrier", "Hz"},
              {"bandwidth", "Hz"},
              {"noise_psd", "dBm/Hz"},
              {"pathloss_ref", "dB at 1 m"},
              {"power_budget_dbm", "dBm"},
              {"scatter_loss_ref", "dB"},
              {"target_rcs_db", "dB"},
              {"eve_guard_radius", "m"},
              {"min_distance", "m"}}},
            {"area_radius", g.area_radius},
            {"carrier", g.carrier},
            {"bandwidth", g.bandwidth},
            {"noise_psd", g.noise_psd},
            {"pathloss_ref", g.pathloss_ref},
            {"pathloss_exp", g.pathloss_exp},
            {"rician_k", g.rician_k},
            {"power_budget_dbm", g.power_budget_dbm},
            {"outage_target", g.outage_target},
            {"element_spacing", g.element_spacing},
            {"scatter_loss_ref", g.scatter_loss_ref},
            {"target_rcs_db", g.target_rcs_db},
            {"eve_guard_radius", g.eve_guard_radius},
            {"min_distance", g.min_distance},
            {"seed", g.seed}};
}

// Every field is optional and falls back to the defaults above.
inline GeometryConfig geometry_from_json(const json &j, const std::string &path = "geometry")
{
    GeometryConfig g;
    if (!j.is_object())
        throw parse_error("parse error at '" + path + "': expected an object");
    auto num = [&](const char *key, double &dst) {
        if (j.contains(key))
            dst = as_double(j[key], path + "." + key);
    };
    num("area_radius", g.area_radius);
    num("carrier", g.carrier);
    num("bandwidth", g.bandwidth);
    num("noise_psd", g.noise_psd);
    num("pathloss_ref", g.pathloss_ref);
    num("pathloss_exp", g.pathloss_exp);
    num("rician_k", g.rician_k);
    num("power_budget_dbm", g.power_budget_dbm);
    num("outage_target", g.outage_target);
    num("element_spacing", g.element_spacing);
    num("scatter_loss_ref", g.scatter_loss_ref);
    num("target_rcs_db", g.target_rcs_db);
    num("eve_guard_radius", g.eve_guard_radius);
    num("min_distance", g.min_distance);
    if (j.contains("seed"))
    {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw parse_error("parse error at '" + path + ".seed': expected an integer");
        g.seed = j["seed"].get<std::uint64_t>();
    }
    try
    {
        g.validate();
    }
    catch (const domain_error &e)
    {
        throw parse_error(std::string("invalid '") + path + "': " + e.what());
    }
    return g;
}
} // namespace io

inline void save_scenario(const Scenario &s, const std::string &path) { io::write_file(io::scenario_to_json(s), path); }

inline Scenario load_scenario(const std::string &path) { return io::scenario_from_json(io::read_file(path)); }

} // namespace secisac

#endif
