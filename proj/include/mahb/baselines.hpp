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

#ifndef MAHB_BASELINES_HPP
#define MAHB_BASELINES_HPP

#include "orchestrator.hpp"

#include <array>
#include <map>
#include <optional>
#include <string_view>

namespace mahb
{
    enum class Scheme
    {
        ma_sub,     // movable sub-arrays, sub-connected (proposed)
        fpa_sub,    // fixed sub-arrays, sub-connected
        fpa_full,   // fixed array, fully-connected
        upper_bound // exhaustive position search, sub-connected
    };

    inline constexpr std::array<Scheme, 4> kAllSchemes{Scheme::ma_sub, Scheme::fpa_sub, Scheme::fpa_full, Scheme::upper_bound};

    inline std::string_view to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::ma_sub:
            return "ma-sub";
        case Scheme::fpa_sub:
            return "fpa-sub";
        case Scheme::fpa_full:
            return "fpa-full";
        case Scheme::upper_bound:
            return "upper-bound";
        }
        return "?";
    }

    inline Scheme parse_scheme(std::string_view tag)
    {
        for (Scheme s : kAllSchemes)
            if (to_string(s) == tag)
                return s;
        throw ConfigError("unknown scheme '" + std::string(tag) + "'");
    }

    inline bool is_fixed_array(Scheme s) { return s == Scheme::fpa_sub || s == Scheme::fpa_full; }

    inline SolverConfig scheme_config(Scheme s, SolverConfig cfg)
    {
        cfg.connectivity = s == Scheme::fpa_full ? Connectivity::fully_connected : Connectivity::sub_connected;
        cfg.move_subarrays = s == Scheme::ma_sub;
        return cfg;
    }

    inline RunResult solve_ma_sub(const ChannelScenario &scenario, const SolverConfig &cfg)
    {
        return solve_multistart(scenario, scheme_config(Scheme::ma_sub, cfg));
    }

    inline RunResult solve_fpa_sub(const ChannelScenario &scenario, const SolverConfig &cfg)
    {
        return solve_multistart(scenario, scheme_config(Scheme::fpa_sub, cfg));
    }

    // Same FP alternating machinery with the power coupled through W_A^H W_A.
    inline RunResult solve_fpa_full(const ChannelScenario &scenario, const SolverConfig &cfg)
    {
        return solve_multistart(scenario, scheme_config(Scheme::fpa_full, cfg));
    }

    struct GridSpec
    {
        enum class Mode
        {
            joint,
            coordinate_wise
        };

        int points_per_axis = 5;
        Mode mode = Mode::coordinate_wise;
        std::size_t joint_budget = 4096; // max candidate assignments in joint mode
        int max_cycles = 20;             // coordinate-wise passes

        void validate() const
        {
            if (points_per_axis < 1)
                throw ConfigError("grid: points per axis must be >= 1");
            if (max_cycles < 1)
                throw ConfigError("grid: max cycles must be >= 1");
        }
    };

    inline std::string_view to_string(GridSpec::Mode m) { return m == GridSpec::Mode::joint ? "joint" : "coordinate-wise"; }

    // points x points lattice over a region, row-major; a single point is the region center.
    inline std::vector<Point> grid_points(const Region &r, int points_per_axis)
    {
        std::vector<Point> out;
        if (points_per_axis == 1)
        {
            out.push_back(r.center());
            return out;
        }
        const double den = points_per_axis - 1;
        for (int i = 0; i < points_per_axis; ++i)
            for (int j = 0; j < points_per_axis; ++j)
                out.emplace_back(r.x_min + r.width() * (j / den), r.y_max - r.height() * (i / den));
        return out;
    }

    struct UpperBoundResult
    {
        RunResult best;
        std::size_t solves = 0; // beamforming-only solves performed
        int cycles = 0;
        GridSpec grid;
        bool incumbent_injected = false;
    };

    // Best beamforming-only solve over grid placements of the sub-array centers.
    //
    // When an incumbent run is given, its centers are added to every per-sub-array grid and
    // its beamformer warm-starts one extra solve at its own placement, so the bound can
    // never fall below the incumbent.
    inline UpperBoundResult upper_bound(const ChannelScenario &scenario, const GridSpec &grid, const SolverConfig &base,
                                        const RunResult *incumbent = nullptr)
    {
        grid.validate();
        const SolverConfig cfg = scheme_config(Scheme::fpa_sub, base);
        cfg.validate();
        const ArrayGeometry &g = scenario.geometry;
        const auto S = static_cast<std::size_t>(g.num_subarrays());

        std::vector<std::vector<Point>> cands(S);
        for (std::size_t s = 0; s < S; ++s)
        {
            cands[s] = grid.points_per_axis == 1 ? std::vector<Point>{g.frame_origin(s)}
                                                 : grid_points(g.region(s), grid.points_per_axis);
            if (incumbent)
            {
                if (!g.feasible(incumbent->centers))
                    throw ConfigError("upper bound: incumbent centers violate the movable regions");
                const Point &p = incumbent->centers[s];
                if (std::find(cands[s].begin(), cands[s].end(), p) == cands[s].end())
                    cands[s].push_back(p);
            }
        }

        if (grid.mode == GridSpec::Mode::joint)
        {
            double total = 1.0;
            for (const auto &c : cands)
                total *= static_cast<double>(c.size());
            if (total > static_cast<double>(grid.joint_budget))
                throw ConfigError("upper bound: joint grid needs " + std::to_string(total) +
                                  " solves, over the budget of " + std::to_string(grid.joint_budget));
        }

        UpperBoundResult out;
        out.grid = grid;
        out.incumbent_injected = incumbent != nullptr;
        std::map<std::vector<double>, double> seen;
        bool have = false;
        SubArrayCenters best_centers;

        auto key = [](const SubArrayCenters &c) {
            std::vector<double> k;
            for (const auto &p : c.points)
            {
                k.push_back(p.x());
                k.push_back(p.y());
            }
            return k;
        };
        auto consider = [&](RunResult r, const SubArrayCenters &c) {
            if (!have || r.final_rate() > out.best.final_rate())
            {
                out.best = std::move(r);
                best_centers = c;
                have = true;
                return true;
            }
            return false;
        };
        auto evaluate = [&](const SubArrayCenters &c) {
            auto k = key(c);
            if (seen.count(k))
                return false;
            RunResult r = solve_multistart(scenario, cfg, c);
            ++out.solves;
            seen.emplace(std::move(k), r.final_rate());
            return consider(std::move(r), c);
        };

        if (incumbent)
        {
            RunResult warm = solve_from(scenario, cfg, warm_state(scenario, incumbent->centers, incumbent->beamformer));
            ++out.solves;
            consider(std::move(warm), incumbent->centers);
        }

        if (grid.mode == GridSpec::Mode::joint)
        {
            std::vector<std::size_t> idx(S, 0);
            while (true)
            {
                SubArrayCenters c;
                for (std::size_t s = 0; s < S; ++s)
                    c.points.push_back(cands[s][idx[s]]);
                evaluate(c);
                std::size_t s = 0;
                for (; s < S; ++s)
                {
                    if (++idx[s] < cands[s].size())
                        break;
                    idx[s] = 0;
                }
                if (s == S)
                    break;
            }
            out.cycles = 1;
            return out;
        }

        SubArrayCenters current = incumbent ? incumbent->centers : g.frame_centers();
        evaluate(current);
        current = best_centers;
        for (int cycle = 0; cycle < grid.max_cycles; ++cycle)
        {
            ++out.cycles;
            bool improved = false;
            for (std::size_t s = 0; s < S; ++s)
                for (const Point &p : cands[s])
                {
                    SubArrayCenters c = current;
                    c[s] = p;
                    if (evaluate(c))
                    {
                        current = best_centers;
                        improved = true;
                    }
                }
            if (!improved)
                break;
        }
        return out;
    }
}

#endif
