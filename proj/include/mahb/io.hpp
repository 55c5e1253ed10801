// SPDX-License-Identifier: Apache-2.0
//
// mahb: movable sub-array hybrid beamforming simulator
// Copyright (C) 2026 The mahb authors
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

#ifndef MAHB_IO_HPP
#define MAHB_IO_HPP

#include "harness.hpp"

#include <nlohmann/json.hpp>

namespace mahb
{
    using nlohmann::json;

    // Complex matrices are stored row-major as separate real and imaginary arrays.
    inline json matrix_to_json(const CMatrix &m)
    {
        json re = json::array(), im = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                re.push_back(m(r, c).real());
                im.push_back(m(r, c).imag());
            }
        return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
    }

    inline CMatrix matrix_from_json(const json &j)
    {
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        const auto &re = j.at("re");
        const auto &im = j.at("im");
        if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
            throw ConfigError("matrix: size does not match rows x cols");
        CMatrix m(rows, cols);
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c, ++i)
                m(r, c) = Complex(re[i].get<double>(), im[i].get<double>());
        return m;
    }

    inline json point_to_json(const Point &p) { return json::array({p.x(), p.y()}); }

    inline Point point_from_json(const json &j)
    {
        if (!j.is_array() || j.size() != 2)
            throw ConfigError("point: expected [x, y]");
        return {j[0].get<double>(), j[1].get<double>()};
    }

    inline json centers_to_json(const SubArrayCenters &c)
    {
        json a = json::array();
        for (const auto &p : c.points)
            a.push_back(point_to_json(p));
        return a;
    }

    inline SubArrayCenters centers_from_json(const json &j)
    {
        SubArrayCenters c;
        for (const auto &p : j)
            c.points.push_back(point_from_json(p));
        return c;
    }

    inline json geometry_to_json(const ArrayGeometry &g)
    {
        json offsets = json::array();
        for (const auto &d : g.offsets())
            offsets.push_back(point_to_json(d));
        return {{"n_rf_h", g.n_rf_h()}, {"n_rf_v", g.n_rf_v()}, {"n_h", g.n_h()}, {"n_v", g.n_v()},
                {"wavelength", g.wavelength()}, {"frame_size", g.frame_size()}, {"offsets", offsets}};
    }

    inline ArrayGeometry geometry_from_json(const json &j)
    {
        GeometryParams p;
        p.n_rf_h = j.at("n_rf_h").get<int>();
        p.n_rf_v = j.at("n_rf_v").get<int>();
        p.n_h = j.at("n_h").get<int>();
        p.n_v = j.at("n_v").get<int>();
        p.wavelength = j.at("wavelength").get<double>();
        p.frame_size = j.at("frame_size").get<double>();
        if (j.contains("offsets"))
            for (const auto &d : j.at("offsets"))
                p.offsets.push_back(point_from_json(d));
        return ArrayGeometry(std::move(p));
    }

    inline json angles_to_json(const std::vector<PathAngle> &a)
    {
        json out = json::array();
        for (const auto &x : a)
            out.push_back(json::array({x.elevation, x.azimuth}));
        return out;
    }

    inline std::vector<PathAngle> angles_from_json(const json &j)
    {
        std::vector<PathAngle> out;
        for (const auto &x : j)
        {
            if (!x.is_array() || x.size() != 2)
                throw ConfigError("angles: expected [elevation, azimuth] pairs");
            out.push_back({x[0].get<double>(), x[1].get<double>()});
        }
        return out;
    }

    // Scenario document: geometry, per-user angles, path-response matrix, noise, seed.
    inline json scenario_to_json(const ChannelScenario &sc)
    {
        json users = json::array();
        for (const auto &u : sc.users)
            users.push_back({{"tx_angles", angles_to_json(u.transmit)},
                             {"rx_angles", angles_to_json(u.receive)},
                             {"rx_position", point_to_json(u.receive_position)},
                             {"path_response", matrix_to_json(u.response)},
                             {"noise_power", u.noise_power}});
        return {{"geometry", geometry_to_json(sc.geometry)}, {"seed", sc.seed}, {"users", users}};
    }

    inline ChannelScenario scenario_from_json(const json &j)
    {
        try
        {
            ChannelScenario sc{geometry_from_json(j.at("geometry")), {}, j.value("seed", std::uint64_t{0})};
            for (const auto &ju : j.at("users"))
            {
                PathSet u;
                u.transmit = angles_from_json(ju.at("tx_angles"));
                u.receive = angles_from_json(ju.at("rx_angles"));
                u.receive_position = ju.contains("rx_position") ? point_from_json(ju.at("rx_position")) : Point::Zero();
                u.response = matrix_from_json(ju.at("path_response"));
                u.noise_power = ju.at("noise_power").get<double>();
                if (u.response.rows() != static_cast<Eigen::Index>(u.transmit.size()) ||
                    u.response.cols() != static_cast<Eigen::Index>(u.receive.size()))
                    throw ConfigError("scenario: path-response matrix must be L_t x L_r");
                if (!(u.noise_power > 0.0))
                    throw ConfigError("scenario: noise power must be positive");
                sc.users.push_back(std::move(u));
            }
            if (sc.users.empty())
                throw ConfigError("scenario: at least one user is required");
            return sc;
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    }

    inline json beamformer_to_json(const HybridBeamformer &bf)
    {
        return {{"connectivity", bf.connectivity == Connectivity::sub_connected ? "sub" : "full"},
                {"phases", std::vector<double>(bf.phases.data(), bf.phases.data() + bf.phases.size())},
                {"digital", matrix_to_json(bf.digital)},
                {"power_budget", bf.power_budget}};
    }

    inline HybridBeamformer beamformer_from_json(const json &j)
    {
        try
        {
            HybridBeamformer bf;
            const auto c = j.at("connectivity").get<std::string>();
            if (c != "sub" && c != "full")
                throw ConfigError("beamformer: connectivity must be 'sub' or 'full'");
            bf.connectivity = c == "sub" ? Connectivity::sub_connected : Connectivity::fully_connected;
            const auto ph = j.at("phases").get<std::vector<double>>();
            bf.phases = Eigen::Map<const RVector>(ph.data(), static_cast<Eigen::Index>(ph.size()));
            bf.digital = matrix_from_json(j.at("digital"));
            bf.power_budget = j.at("power_budget").get<double>();
            return bf;
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("beamformer: ") + e.what());
        }
    }

    inline json iteration_to_json(const IterationRecord &r)
    {
        return {{"iteration", r.iteration},
                {"surrogate_nats", r.surrogate},
                {"sum_rate_bps_hz", r.sum_rate},
                {"sinr", std::vector<double>(r.sinr.data(), r.sinr.data() + r.sinr.size())},
                {"lambda", r.multiplier},
                {"eta", r.eta},
                {"analog_accepted", r.analog_accepted},
                {"centers", centers_to_json(r.centers)}};
    }

    inline json run_result_to_json(const RunResult &r)
    {
        return {{"beamformer", beamformer_to_json(r.beamformer)},
                {"centers", centers_to_json(r.centers)},
                {"initial_rate_bps_hz", r.initial_rate},
                {"final_rate_bps_hz", r.final_rate()},
                {"rate_trace", r.rate_trace},
                {"surrogate_trace", r.surrogate_trace},
                {"iterations", r.iterations},
                {"termination", to_string(r.termination)},
                {"seconds", r.seconds}};
    }

    inline json aggregate_to_json(const AggregateRow &r)
    {
        return {{"scheme", to_string(r.scheme)}, {"sweep_value", r.sweep_value}, {"mean_rate_bps_hz", r.mean_rate},
                {"stderr", r.stderr_rate},        {"trials", r.trials},           {"mean_iters", r.mean_iterations},
                {"mean_seconds", r.mean_seconds}};
    }

    inline AggregateRow aggregate_from_json(const json &j)
    {
        return {parse_scheme(j.at("scheme").get<std::string>()), j.at("sweep_value").get<double>(),
                j.at("mean_rate_bps_hz").get<double>(),           j.at("stderr").get<double>(),
                j.at("trials").get<int>(),                        j.at("mean_iters").get<double>(),
                j.at("mean_seconds").get<double>()};
    }

    inline json trial_to_json(const TrialRow &r)
    {
        json j = {{"scheme", to_string(r.scheme)}, {"sweep_value", r.sweep_value}, {"trial", r.trial},
                  {"seed", r.seed},                {"scenario_hash", r.scenario_hash},
                  {"rate_bps_hz", r.rate},         {"initial_rate_bps_hz", r.initial_rate},
                  {"iterations", r.iterations},    {"seconds", r.seconds}, {"failed", r.failed}};
        if (r.failed)
            j["error"] = r.error;
        return j;
    }

    inline json experiment_to_json(const ExperimentResult &res, const ExperimentConfig &cfg)
    {
        json rows = json::array(), raw = json::array();
        for (const auto &r : res.aggregates)
            rows.push_back(aggregate_to_json(r));
        for (const auto &r : res.trials)
            raw.push_back(trial_to_json(r));
        return {{"sweep_axis", to_string(cfg.axis)}, {"master_seed", cfg.master_seed}, {"rows", rows},
                {"trials", raw}, {"failures", res.failures}};
    }

    enum class OutputFormat
    {
        csv,
        json
    };

    inline OutputFormat parse_format(std::string_view f)
    {
        if (f == "csv")
            return OutputFormat::csv;
        if (f == "json")
            return OutputFormat::json;
        throw ConfigError("unknown output format '" + std::string(f) + "'");
    }

    // Writes aggregate rows (ordered by scheme, then sweep value) as CSV or a JSON array.
    inline void emit_results(const std::vector<AggregateRow> &rows, OutputFormat format, const std::string &path)
    {
        if (rows.empty())
            throw ConfigError("emit: no rows to write");
        if (format == OutputFormat::csv)
        {
            write_text(path, to_csv(rows));
            return;
        }
        json a = json::array();
        for (const auto &r : rows)
            a.push_back(aggregate_to_json(r));
        write_text(path, a.dump(2) + "\n");
    }

    // Config file. Every key is optional; lengths are given in wavelengths, powers in dBm/dB.
    inline void apply_config_json(const json &j, ExperimentConfig &cfg)
    {
        try
        {
            if (j.contains("scenario"))
            {
                const json &s = j.at("scenario");
                ScenarioConfig &sc = cfg.scenario;
                GeometryParams &g = sc.geometry;
                const double lambda_old = g.wavelength;
                const double frame_wl = g.frame_size / lambda_old;
                sc.users = s.value("users", sc.users);
                sc.paths = s.value("paths", sc.paths);
                g.wavelength = s.value("wavelength", g.wavelength);
                if (s.contains("carrier_hz"))
                    g.wavelength = 299792458.0 / s.at("carrier_hz").get<double>();
                sc.reference_gain_db = s.value("reference_gain_db", sc.reference_gain_db);
                sc.pathloss_exponent = s.value("pathloss_exponent", sc.pathloss_exponent);
                sc.distance_min = s.value("distance_min", sc.distance_min);
                sc.distance_max = s.value("distance_max", sc.distance_max);
                sc.noise_dbm = s.value("noise_dbm", sc.noise_dbm);
                if (s.contains("gain_convention"))
                {
                    const auto gc = s.at("gain_convention").get<std::string>();
                    if (gc == "amplitude-squared")
                        sc.gain_convention = GainConvention::amplitude_squared;
                    else if (gc == "power")
                        sc.gain_convention = GainConvention::power;
                    else
                        throw ConfigError("gain_convention must be 'amplitude-squared' or 'power'");
                }
                g.frame_size = frame_wl * g.wavelength;
                if (s.contains("geometry"))
                {
                    const json &gj = s.at("geometry");
                    g.n_rf_h = gj.value("n_rf_h", g.n_rf_h);
                    g.n_rf_v = gj.value("n_rf_v", g.n_rf_v);
                    g.n_h = gj.value("n_h", g.n_h);
                    g.n_v = gj.value("n_v", g.n_v);
                    g.frame_size = gj.value("frame_size_wavelengths", frame_wl) * g.wavelength;
                    g.offsets.clear();
                    if (gj.contains("offsets_wavelengths"))
                        for (const auto &d : gj.at("offsets_wavelengths"))
                            g.offsets.push_back(point_from_json(d) * g.wavelength);
                }
            }
            if (j.contains("solver"))
            {
                const json &s = j.at("solver");
                SolverConfig &sv = cfg.solver;
                if (s.contains("power_dbm"))
                    sv.power_budget = dbm_to_watts(s.at("power_dbm").get<double>());
                sv.tolerance = s.value("tolerance", sv.tolerance);
                sv.max_iterations = s.value("max_iterations", sv.max_iterations);
                sv.step.initial_step = s.value("initial_step", sv.step.initial_step);
                sv.step.shrink = s.value("shrink", sv.step.shrink);
                sv.step.max_backtracks = s.value("max_backtracks", sv.step.max_backtracks);
                sv.restarts = s.value("restarts", sv.restarts);
                if (s.contains("penalty"))
                {
                    const json &pj = s.at("penalty");
                    sv.penalty.initial_factor = pj.value("initial_factor", sv.penalty.initial_factor);
                    sv.penalty.growth = pj.value("growth", sv.penalty.growth);
                    sv.penalty.max_factor = pj.value("max_factor", sv.penalty.max_factor);
                    sv.penalty.inner_iterations = pj.value("inner_iterations", sv.penalty.inner_iterations);
                }
                if (s.contains("bisection"))
                {
                    const json &bj = s.at("bisection");
                    sv.bisection.relative_tolerance = bj.value("relative_tolerance", sv.bisection.relative_tolerance);
                    sv.bisection.max_iterations = bj.value("max_iterations", sv.bisection.max_iterations);
                }
            }
            if (j.contains("grid"))
            {
                const json &gj = j.at("grid");
                cfg.grid.points_per_axis = gj.value("points_per_axis", cfg.grid.points_per_axis);
                cfg.grid.joint_budget = gj.value("joint_budget", cfg.grid.joint_budget);
                cfg.grid.max_cycles = gj.value("max_cycles", cfg.grid.max_cycles);
                if (gj.contains("mode"))
                {
                    const auto m = gj.at("mode").get<std::string>();
                    if (m == "joint")
                        cfg.grid.mode = GridSpec::Mode::joint;
                    else if (m == "coordinate-wise")
                        cfg.grid.mode = GridSpec::Mode::coordinate_wise;
                    else
                        throw ConfigError("grid mode must be 'joint' or 'coordinate-wise'");
                }
            }
            if (j.contains("experiment"))
            {
                const json &e = j.at("experiment");
                cfg.trials = e.value("trials", cfg.trials);
                cfg.master_seed = e.value("master_seed", cfg.master_seed);
                cfg.workers = e.value("workers", cfg.workers);
                cfg.record_timing = e.value("record_timing", cfg.record_timing);
                cfg.fpa_frame_size = e.value("fpa_frame_size_wavelengths", 0.0) * cfg.scenario.geometry.wavelength;
                if (e.contains("schemes"))
                {
                    cfg.schemes.clear();
                    for (const auto &s : e.at("schemes"))
                        cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
                }
                if (e.contains("sweep_values"))
                    cfg.sweep_values = e.at("sweep_values").get<std::vector<double>>();
            }
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    inline json read_json_file(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw ConfigError("cannot open '" + path + "'");
        try
        {
            return json::parse(is);
        }
        catch (const json::exception &e)
        {
            throw ConfigError("'" + path + "': " + e.what());
        }
    }
}

#endif
