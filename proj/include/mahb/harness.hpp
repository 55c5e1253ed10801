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

#ifndef MAHB_HARNESS_HPP
#define MAHB_HARNESS_HPP

#include "baselines.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mahb
{
    enum class SweepAxis
    {
        none,
        power, // P_max [dBm]
        region // D / lambda
    };

    inline std::string_view to_string(SweepAxis a)
    {
        return a == SweepAxis::power ? "power" : a == SweepAxis::region ? "region" : "none";
    }

    inline const std::vector<double> &default_power_sweep()
    {
        static const std::vector<double> v{0.0, 5.0, 10.0, 15.0};
        return v;
    }

    inline const std::vector<double> &default_region_sweep()
    {
        static const std::vector<double> v{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
        return v;
    }

    struct ExperimentConfig
    {
        ScenarioConfig scenario;
        SolverConfig solver;
        GridSpec grid;
        SweepAxis axis = SweepAxis::none;
        std::vector<double> sweep_values;
        int trials = 100;
        std::vector<Scheme> schemes{Scheme::ma_sub, Scheme::fpa_sub, Scheme::fpa_full};
        std::uint64_t master_seed = 1;
        int workers = 1;
        bool record_timing = false; // wall-clock in outputs breaks byte-identical reruns
        double fpa_frame_size = 0.0; // frame edge for fixed arrays [m]; 0 keeps scenario.geometry.frame_size

        void validate() const
        {
            scenario.validate();
            solver.validate();
            grid.validate();
            if (trials < 1)
                throw ConfigError("experiment: trials must be >= 1");
            if (schemes.empty())
                throw ConfigError("experiment: at least one scheme is required");
            if (axis != SweepAxis::none && sweep_values.empty())
                throw ConfigError("experiment: sweep values must be non-empty");
            if (workers < 1)
                throw ConfigError("experiment: workers must be >= 1");
            if (fpa_frame_size < 0.0)
                throw ConfigError("experiment: fpa frame size must be non-negative");
        }
    };

    struct TrialRow
    {
        Scheme scheme = Scheme::ma_sub;
        int sweep_index = 0;
        double sweep_value = 0.0;
        int trial = 0;
        std::uint64_t seed = 0;
        std::uint64_t scenario_hash = 0;
        double rate = 0.0;
        double initial_rate = 0.0;
        int iterations = 0;
        double seconds = 0.0;
        bool failed = false;
        std::string error;
    };

    struct AggregateRow
    {
        Scheme scheme = Scheme::ma_sub;
        double sweep_value = 0.0;
        double mean_rate = 0.0;
        double stderr_rate = 0.0;
        int trials = 0;
        double mean_iterations = 0.0;
        double mean_seconds = 0.0;
    };

    struct ExperimentResult
    {
        std::vector<AggregateRow> aggregates;
        std::vector<TrialRow> trials;
        std::size_t failures = 0;
    };

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Child seed of one trial. Independent of the scheme list and of the sweep point, so every
    // scheme and every sweep value of trial t sees the same channel draw.
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial)
    {
        constexpr std::uint64_t salt = 0x6d61686273656564ULL;
        return splitmix64(splitmix64(master ^ salt) + trial);
    }

    inline std::uint64_t init_seed_for(std::uint64_t scenario_seed) { return splitmix64(scenario_seed ^ 0x5eedULL); }

    // FNV-1a over the random content of a scenario (paths, gains, noise, seed).
    inline std::uint64_t scenario_hash(const ChannelScenario &sc)
    {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&](double v) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            for (int i = 0; i < 8; ++i)
            {
                h ^= (bits >> (8 * i)) & 0xffu;
                h *= 1099511628211ULL;
            }
        };
        mix(static_cast<double>(sc.seed));
        for (const auto &u : sc.users)
        {
            for (const auto &a : u.transmit)
            {
                mix(a.elevation);
                mix(a.azimuth);
            }
            for (const auto &a : u.receive)
            {
                mix(a.elevation);
                mix(a.azimuth);
            }
            mix(u.receive_position.x());
            mix(u.receive_position.y());
            for (Eigen::Index i = 0; i < u.response.size(); ++i)
            {
                mix(u.response.data()[i].real());
                mix(u.response.data()[i].imag());
            }
            mix(u.noise_power);
        }
        return h;
    }

    inline std::vector<AggregateRow> aggregate(const std::vector<TrialRow> &rows, bool record_timing = true)
    {
        std::map<std::pair<std::string, int>, std::vector<const TrialRow *>> groups;
        for (const auto &r : rows)
            if (!r.failed)
                groups[{std::string(to_string(r.scheme)), r.sweep_index}].push_back(&r);

        std::vector<AggregateRow> out;
        for (const auto &[key, members] : groups)
        {
            AggregateRow a;
            a.scheme = members.front()->scheme;
            a.sweep_value = members.front()->sweep_value;
            a.trials = static_cast<int>(members.size());
            const double n = static_cast<double>(members.size());
            for (const TrialRow *m : members)
            {
                a.mean_rate += m->rate;
                a.mean_iterations += m->iterations;
                a.mean_seconds += m->seconds;
            }
            a.mean_rate /= n;
            a.mean_iterations /= n;
            a.mean_seconds = record_timing ? a.mean_seconds / n : 0.0;
            if (members.size() > 1)
            {
                double ss = 0.0;
                for (const TrialRow *m : members)
                    ss += (m->rate - a.mean_rate) * (m->rate - a.mean_rate);
                a.stderr_rate = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
            out.push_back(a);
        }
        std::stable_sort(out.begin(), out.end(), [](const AggregateRow &x, const AggregateRow &y) {
            const auto sx = to_string(x.scheme), sy = to_string(y.scheme);
            if (sx != sy)
                return sx < sy;
            return x.sweep_value < y.sweep_value;
        });
        return out;
    }

    namespace detail
    {
        struct TrialTask
        {
            int sweep_index;
            double sweep_value;
            int trial;
        };

        inline void run_trial(const ExperimentConfig &cfg, const TrialTask &task, std::vector<TrialRow> &rows)
        {
            const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(task.trial));
            ScenarioConfig sc_cfg = cfg.scenario;
            SolverConfig solver = cfg.solver;
            solver.init_seed = init_seed_for(seed);
            if (cfg.axis == SweepAxis::power)
                solver.power_budget = dbm_to_watts(task.sweep_value);
            const double nominal_frame = cfg.scenario.geometry.frame_size;
            if (cfg.axis == SweepAxis::region)
                sc_cfg.geometry.frame_size = task.sweep_value * cfg.scenario.geometry.wavelength;

            const ChannelScenario movable = sample_scenario(sc_cfg, seed);
            ChannelScenario fixed = movable;
            fixed.geometry = movable.geometry.with_frame_size(cfg.fpa_frame_size > 0.0 ? cfg.fpa_frame_size : nominal_frame);
            const std::uint64_t hash = scenario_hash(movable);

            // ma-sub first so the upper bound can inject its solution.
            std::vector<Scheme> order = cfg.schemes;
            std::stable_sort(order.begin(), order.end(), [](Scheme a, Scheme b) { return a == Scheme::ma_sub && b != Scheme::ma_sub; });
            std::optional<RunResult> proposed;
            for (Scheme s : order)
            {
                TrialRow row;
                row.scheme = s;
                row.sweep_index = task.sweep_index;
                row.sweep_value = task.sweep_value;
                row.trial = task.trial;
                row.seed = seed;
                row.scenario_hash = hash;
                try
                {
                    RunResult r;
                    switch (s)
                    {
                    case Scheme::ma_sub:
                        r = solve_ma_sub(movable, solver);
                        proposed = r;
                        break;
                    case Scheme::fpa_sub:
                        r = solve_fpa_sub(fixed, solver);
                        break;
                    case Scheme::fpa_full:
                        r = solve_fpa_full(fixed, solver);
                        break;
                    case Scheme::upper_bound:
                        r = upper_bound(movable, cfg.grid, solver, proposed ? &*proposed : nullptr).best;
                        break;
                    }
                    row.rate = r.final_rate();
                    row.initial_rate = r.initial_rate;
                    row.iterations = r.iterations;
                    row.seconds = cfg.record_timing ? r.seconds : 0.0;
                }
                catch (const std::exception &e)
                {
                    row.failed = true;
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }

    // Every sweep point x trial, each scheme on the same scenario draw. Work items run on
    // `workers` threads; rows are sorted afterwards so output does not depend on scheduling.
    inline ExperimentResult run_experiment(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<detail::TrialTask> tasks;
        const std::vector<double> values = cfg.axis == SweepAxis::none ? std::vector<double>{0.0} : cfg.sweep_values;
        for (std::size_t p = 0; p < values.size(); ++p)
            for (int t = 0; t < cfg.trials; ++t)
                tasks.push_back({static_cast<int>(p), values[p], t});

        std::vector<std::vector<TrialRow>> slots(tasks.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++)
                detail::run_trial(cfg, tasks[i], slots[i]);
        };
        const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), tasks.size());
        if (n_workers <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < n_workers; ++w)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }

        ExperimentResult out;
        for (auto &s : slots)
            for (auto &r : s)
            {
                if (r.failed)
                {
                    ++out.failures;
                    std::cerr << "warning: " << to_string(r.scheme) << " trial " << r.trial << " at sweep value "
                              << r.sweep_value << " failed: " << r.error << "\n";
                }
                out.trials.push_back(std::move(r));
            }
        std::stable_sort(out.trials.begin(), out.trials.end(), [](const TrialRow &a, const TrialRow &b) {
            const auto sa = to_string(a.scheme), sb = to_string(b.scheme);
            if (sa != sb)
                return sa < sb;
            if (a.sweep_index != b.sweep_index)
                return a.sweep_index < b.sweep_index;
            return a.trial < b.trial;
        });
        if (static_cast<double>(out.failures) > 0.1 * static_cast<double>(out.trials.size()))
            throw RuntimeFailure("experiment: " + std::to_string(out.failures) + " of " + std::to_string(out.trials.size()) +
                                 " runs failed (threshold 10%)");
        out.aggregates = aggregate(out.trials, cfg.record_timing);
        return out;
    }

    inline ExperimentResult sweep_power(ExperimentConfig cfg)
    {
        cfg.axis = SweepAxis::power;
        if (cfg.sweep_values.empty())
            cfg.sweep_values = default_power_sweep();
        return run_experiment(cfg);
    }

    // Fixed-array schemes keep the nominal frame size, so their rows do not depend on D.
    inline ExperimentResult sweep_region(ExperimentConfig cfg)
    {
        cfg.axis = SweepAxis::region;
        if (cfg.sweep_values.empty())
            cfg.sweep_values = default_region_sweep();
        return run_experiment(cfg);
    }

    inline std::string format_double(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return buf;
    }

    inline constexpr const char *kCsvHeader = "scheme,sweep_value,mean_rate_bps_hz,stderr,trials,mean_iters,mean_seconds";

    inline std::string to_csv(const std::vector<AggregateRow> &rows)
    {
        if (rows.empty())
            throw ConfigError("emit: no rows to write");
        std::ostringstream os;
        os << kCsvHeader << "\n";
        for (const auto &r : rows)
            os << to_string(r.scheme) << ',' << format_double(r.sweep_value) << ',' << format_double(r.mean_rate) << ','
               << format_double(r.stderr_rate) << ',' << r.trials << ',' << format_double(r.mean_iterations) << ','
               << format_double(r.mean_seconds) << "\n";
        return os.str();
    }

    inline std::vector<AggregateRow> parse_csv(const std::string &text)
    {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || line != kCsvHeader)
            throw ConfigError("csv: unexpected header");
        std::vector<AggregateRow> out;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> f;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                f.push_back(cell);
            if (f.size() != 7)
                throw ConfigError("csv: expected 7 fields in '" + line + "'");
            out.push_back({parse_scheme(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stoi(f[4]),
                           std::stod(f[5]), std::stod(f[6])});
        }
        return out;
    }

    inline void write_text(const std::string &path, const std::string &text)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw ConfigError("cannot open '" + path + "' for writing");
        os << text;
        if (!os)
            throw ConfigError("failed writing '" + path + "'");
    }
}

#endif
