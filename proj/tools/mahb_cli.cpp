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

#include "CLI11.hpp"
#include "mahb/mahb.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace
{
    using namespace mahb;

    struct GlobalOptions
    {
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        std::string config_path;
        std::string out_path;
        std::string format = "csv";
        std::vector<std::string> schemes;
        std::string trace_path;
        std::optional<int> workers;
        std::optional<int> restarts;
        std::optional<double> power_dbm;
        std::optional<double> frame_wavelengths;
        std::string gain_convention;
    };

    ExperimentConfig build_config(const GlobalOptions &g)
    {
        ExperimentConfig cfg;
        if (!g.config_path.empty())
            apply_config_json(read_json_file(g.config_path), cfg);
        if (g.seed)
            cfg.master_seed = *g.seed;
        if (g.trials)
            cfg.trials = *g.trials;
        if (g.workers)
            cfg.workers = *g.workers;
        if (g.restarts)
            cfg.solver.restarts = *g.restarts;
        if (g.power_dbm)
            cfg.solver.power_budget = dbm_to_watts(*g.power_dbm);
        if (g.frame_wavelengths)
            cfg.scenario.geometry.frame_size = *g.frame_wavelengths * cfg.scenario.geometry.wavelength;
        if (!g.gain_convention.empty())
            apply_config_json({{"scenario", {{"gain_convention", g.gain_convention}}}}, cfg);
        if (!g.schemes.empty())
        {
            cfg.schemes.clear();
            for (const auto &s : g.schemes)
                cfg.schemes.push_back(parse_scheme(s));
        }
        cfg.validate();
        return cfg;
    }

    void write_output(const std::string &path, const std::string &text)
    {
        if (path.empty())
            std::cout << text;
        else
            write_text(path, text);
    }

    // Solves one scenario with one scheme, optionally streaming per-iteration JSON lines.
    json run_single(const ChannelScenario &sc, Scheme scheme, const ExperimentConfig &cfg, const std::string &trace_path)
    {
        std::ofstream trace;
        if (!trace_path.empty())
        {
            trace.open(trace_path);
            if (!trace)
                throw ConfigError("cannot open trace file '" + trace_path + "'");
        }
        IterationObserver obs;
        if (trace.is_open())
            obs = [&](const IterationRecord &rec, const SolverState &) { trace << iteration_to_json(rec).dump() << "\n"; };

        SolverConfig solver = cfg.solver;
        solver.init_seed = init_seed_for(sc.seed);
        json out;
        if (scheme == Scheme::upper_bound)
        {
            const RunResult proposed = solve_multistart(sc, scheme_config(Scheme::ma_sub, solver), obs);
            const UpperBoundResult ub = upper_bound(sc, cfg.grid, solver, &proposed);
            out = run_result_to_json(ub.best);
            out["grid"] = {{"points_per_axis", ub.grid.points_per_axis},
                           {"mode", to_string(ub.grid.mode)},
                           {"solves", ub.solves},
                           {"cycles", ub.cycles},
                           {"incumbent_injected", ub.incumbent_injected}};
            out["ma_sub_rate_bps_hz"] = proposed.final_rate();
        }
        else
        {
            ChannelScenario target = sc;
            if (is_fixed_array(scheme) && cfg.fpa_frame_size > 0.0)
                target.geometry = sc.geometry.with_frame_size(cfg.fpa_frame_size);
            out = run_result_to_json(solve_multistart(target, scheme_config(scheme, solver), obs));
        }
        out["scheme"] = to_string(scheme);
        out["seed"] = sc.seed;
        return out;
    }

    void run_sweep(ExperimentConfig cfg, SweepAxis axis, const std::vector<double> &values, const GlobalOptions &g)
    {
        if (!values.empty())
            cfg.sweep_values = values;
        const ExperimentResult res = axis == SweepAxis::power ? sweep_power(cfg) : sweep_region(cfg);
        cfg.axis = axis;
        if (g.format == "csv")
            write_output(g.out_path, to_csv(res.aggregates));
        else
            write_output(g.out_path, experiment_to_json(res, cfg).dump(2) + "\n");
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Movable sub-array hybrid beamforming simulator"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--seed", g.seed, "Master seed (scenario seed for single runs)");
    app.add_option("--trials", g.trials, "Monte-Carlo trials per sweep point");
    app.add_option("--config", g.config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_path, "Output file (stdout when omitted)");
    app.add_option("--format", g.format, "Sweep output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--schemes", g.schemes, "Schemes: ma-sub fpa-sub fpa-full upper-bound")->delimiter(',');
    app.add_option("--trace", g.trace_path, "Write one JSON line per AO iteration");
    app.add_option("--workers", g.workers, "Worker threads for sweeps");
    app.add_option("--restarts", g.restarts, "Random restarts per solve (best kept)");
    app.add_option("--power-dbm", g.power_dbm, "Power budget P_max [dBm]");
    app.add_option("--frame-size", g.frame_wavelengths, "Frame edge D in wavelengths");
    app.add_option("--gain-convention", g.gain_convention, "Path variance convention")
        ->check(CLI::IsMember({"amplitude-squared", "power"}));

    std::string scheme_tag = "ma-sub";
    std::string scenario_path, save_scenario;
    std::vector<double> power_values, region_values;
    int points = 0;
    std::string grid_mode;

    auto *solve_cmd = app.add_subcommand("solve", "Solve one sampled scenario and print the RunResult JSON");
    solve_cmd->add_option("--scheme", scheme_tag, "Scheme tag")->check(CLI::IsMember({"ma-sub", "fpa-sub", "fpa-full", "upper-bound"}));
    solve_cmd->add_option("--save-scenario", save_scenario, "Also write the sampled scenario JSON");
    auto *power_cmd = app.add_subcommand("sweep-power", "Sum rate versus P_max");
    power_cmd->add_option("--values", power_values, "P_max values [dBm]")->delimiter(',');
    auto *region_cmd = app.add_subcommand("sweep-region", "Sum rate versus D / lambda");
    region_cmd->add_option("--values", region_values, "D / lambda values")->delimiter(',');
    auto *ub_cmd = app.add_subcommand("upper-bound", "Exhaustive-search upper bound for one scenario");
    ub_cmd->add_option("--points", points, "Grid points per axis per sub-array");
    ub_cmd->add_option("--mode", grid_mode, "Grid search mode")->check(CLI::IsMember({"joint", "coordinate-wise"}));
    auto *replay_cmd = app.add_subcommand("replay", "Load a scenario JSON and run one scheme");
    replay_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--scheme", scheme_tag, "Scheme tag")->check(CLI::IsMember({"ma-sub", "fpa-sub", "fpa-full", "upper-bound"}));
    for (auto *sub : {solve_cmd, power_cmd, region_cmd, ub_cmd, replay_cmd})
        sub->fallthrough();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try
    {
        ExperimentConfig cfg = build_config(g);
        if (*power_cmd)
            run_sweep(cfg, SweepAxis::power, power_values, g);
        else if (*region_cmd)
            run_sweep(cfg, SweepAxis::region, region_values, g);
        else if (*replay_cmd)
        {
            const ChannelScenario sc = scenario_from_json(read_json_file(scenario_path));
            write_output(g.out_path, run_single(sc, parse_scheme(scheme_tag), cfg, g.trace_path).dump(2) + "\n");
        }
        else
        {
            if (*ub_cmd)
            {
                scheme_tag = "upper-bound";
                if (points > 0)
                    cfg.grid.points_per_axis = points;
                if (grid_mode == "joint")
                    cfg.grid.mode = GridSpec::Mode::joint;
                else if (grid_mode == "coordinate-wise")
                    cfg.grid.mode = GridSpec::Mode::coordinate_wise;
            }
            const ChannelScenario sc = sample_scenario(cfg.scenario, cfg.master_seed);
            if (!save_scenario.empty())
                write_text(save_scenario, scenario_to_json(sc).dump(2) + "\n");
            write_output(g.out_path, run_single(sc, parse_scheme(scheme_tag), cfg, g.trace_path).dump(2) + "\n");
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    }
    catch (const RuntimeFailure &e)
    {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
