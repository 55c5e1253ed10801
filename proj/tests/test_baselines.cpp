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

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mahb;

namespace
{
    ScenarioConfig nominal()
    {
        ScenarioConfig cfg;
        cfg.gain_convention = GainConvention::power;
        return cfg;
    }
}

TEST(Scheme, TagsRoundTrip)
{
    for (Scheme s : kAllSchemes)
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_EQ(to_string(Scheme::ma_sub), "ma-sub");
    EXPECT_EQ(to_string(Scheme::upper_bound), "upper-bound");
    EXPECT_THROW(parse_scheme("ma"), ConfigError);
    EXPECT_TRUE(is_fixed_array(Scheme::fpa_full));
    EXPECT_FALSE(is_fixed_array(Scheme::ma_sub));
}

TEST(FpaSub, SharesInitialStateWithMaSub)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const ChannelScenario sc = sample_scenario(nominal(), seed);
        SolverConfig cfg;
        cfg.init_seed = seed;
        const RunResult ma = solve_ma_sub(sc, cfg);
        const RunResult fpa = solve_fpa_sub(sc, cfg);
        EXPECT_EQ(ma.initial_rate, fpa.initial_rate);
        EXPECT_EQ(fpa.centers, sc.geometry.frame_centers());
        EXPECT_EQ(solve_fpa_sub(sc, cfg).rate_trace, fpa.rate_trace);
    }
}

TEST(FpaSub, EqualsMaSubWithZeroSizeRegions)
{
    ScenarioConfig sc_cfg = nominal();
    sc_cfg.geometry.frame_size = 0.5 * sc_cfg.geometry.wavelength;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const ChannelScenario sc = sample_scenario(sc_cfg, seed);
        ASSERT_EQ(sc.geometry.region(0).width(), 0.0);
        SolverConfig cfg;
        cfg.init_seed = seed;
        const RunResult ma = solve_ma_sub(sc, cfg);
        const RunResult fpa = solve_fpa_sub(sc, cfg);
        EXPECT_EQ(ma.rate_trace, fpa.rate_trace);
        EXPECT_EQ(ma.centers, fpa.centers);
    }
}

TEST(FpaFull, FeasibleUnitModulusMonotone)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
    {
        const ChannelScenario sc = sample_scenario(nominal(), seed);
        SolverConfig cfg = scheme_config(Scheme::fpa_full, {});
        cfg.init_seed = seed;
        const RunResult r = solve_multistart(sc, cfg, [&](const IterationRecord &, const SolverState &st) {
            ASSERT_EQ(st.beamformer.phases.size(), 16 * 4);
            const CMatrix wa = st.beamformer.analog_matrix(sc.geometry);
            ASSERT_LE((wa.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-12);
            ASSERT_LE(st.beamformer.transmit_power(sc.geometry), cfg.power_budget * (1.0 + 1e-9));
            ASSERT_EQ(st.centers, sc.geometry.frame_centers());
        });
        EXPECT_GE(r.final_rate(), r.initial_rate);
        for (std::size_t t = 1; t < r.surrogate_trace.size(); ++t)
            EXPECT_GE(r.surrogate_trace[t], r.surrogate_trace[t - 1] - 1e-6);
    }
}

TEST(FpaFull, SingleUserSinglePathBelowMatchedFilterBound)
{
    // One user, one path: no precoder beats log2(1 + P ||h||^2 / sigma^2).
    ScenarioConfig sc_cfg = nominal();
    sc_cfg.users = 1;
    sc_cfg.paths = 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const ChannelScenario sc = sample_scenario(sc_cfg, seed);
        SolverConfig cfg;
        cfg.init_seed = seed;
        const CMatrix H = channel_matrix(sc.geometry.frame_centers(), sc);
        const double bound = std::log2(1.0 + cfg.power_budget * H.squaredNorm() / sc.users[0].noise_power);
        EXPECT_LE(solve_fpa_full(sc, cfg).final_rate(), bound * (1.0 + 1e-12));
        EXPECT_LE(solve_fpa_sub(sc, cfg).final_rate(), bound * (1.0 + 1e-12));
    }
}

// Fully-connected >= sub-connected on single-user single-path channels in 90% of seeds.
// Measured at 39/100 with the default penalty schedule: both schemes stall below the
// matched-filter bound once eta reaches its cap, and which one stalls higher varies.
TEST(FpaFull, DISABLED_SingleUserSinglePathAtLeastSubConnected)
{
    ScenarioConfig sc_cfg = nominal();
    sc_cfg.users = 1;
    sc_cfg.paths = 1;
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const ChannelScenario sc = sample_scenario(sc_cfg, seed);
        SolverConfig cfg;
        cfg.init_seed = seed;
        wins += solve_fpa_full(sc, cfg).final_rate() >= solve_fpa_sub(sc, cfg).final_rate() - 1e-9;
    }
    EXPECT_GE(wins, 90);
}

TEST(MaSub, MovementHelpsInMostTrials)
{
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const ChannelScenario sc = sample_scenario(nominal(), 5000 + seed);
        SolverConfig cfg;
        cfg.init_seed = seed;
        wins += solve_fpa_sub(sc, cfg).final_rate() <= solve_ma_sub(sc, cfg).final_rate();
    }
    EXPECT_GE(wins, 90);
}

TEST(GridPoints, Layout)
{
    const Region r{0.0, 1.0, -1.0, 1.0};
    const auto one = grid_points(r, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], Point(0.5, 0.0));
    const auto three = grid_points(r, 3);
    ASSERT_EQ(three.size(), 9u);
    EXPECT_EQ(three[0], Point(0.0, 1.0));
    EXPECT_EQ(three[2], Point(1.0, 1.0));
    EXPECT_EQ(three[8], Point(1.0, -1.0));
    for (const auto &p : three)
        EXPECT_TRUE(r.contains(p));
}

TEST(UpperBound, SinglePointGridEqualsFpaSub)
{
    const ChannelScenario sc = sample_scenario(nominal(), 21);
    SolverConfig cfg;
    cfg.init_seed = 21;
    GridSpec grid;
    grid.points_per_axis = 1;
    const UpperBoundResult ub = upper_bound(sc, grid, cfg);
    EXPECT_EQ(ub.best.final_rate(), solve_fpa_sub(sc, cfg).final_rate());
    EXPECT_EQ(ub.solves, 1u);
}

TEST(UpperBound, JointEnumerationCount)
{
    ScenarioConfig sc_cfg = nominal();
    sc_cfg.geometry.n_rf_h = sc_cfg.geometry.n_rf_v = 1;
    const ChannelScenario sc = sample_scenario(sc_cfg, 22);
    SolverConfig cfg;
    GridSpec grid;
    grid.points_per_axis = 3;
    grid.mode = GridSpec::Mode::joint;
    const UpperBoundResult ub = upper_bound(sc, grid, cfg);
    EXPECT_EQ(ub.solves, 9u);
    double best = 0.0;
    for (const Point &p : grid_points(sc.geometry.region(0), 3))
        best = std::max(best, solve_multistart(sc, scheme_config(Scheme::fpa_sub, cfg), SubArrayCenters{{p}}).final_rate());
    EXPECT_EQ(ub.best.final_rate(), best);
}

TEST(UpperBound, JointBudgetCheckedBeforeWork)
{
    const ChannelScenario sc = sample_scenario(nominal(), 23);
    GridSpec grid;
    grid.mode = GridSpec::Mode::joint;
    grid.points_per_axis = 5; // 25^4 assignments
    EXPECT_THROW(upper_bound(sc, grid, {}), ConfigError);
    grid.points_per_axis = 0;
    EXPECT_THROW(upper_bound(sc, grid, {}), ConfigError);
}

TEST(UpperBound, JointMonotoneUnderRefinement)
{
    ScenarioConfig sc_cfg = nominal();
    sc_cfg.geometry.n_rf_v = 1;
    for (std::uint64_t seed = 30; seed < 33; ++seed)
    {
        const ChannelScenario sc = sample_scenario(sc_cfg, seed);
        SolverConfig cfg;
        GridSpec coarse;
        coarse.mode = GridSpec::Mode::joint;
        coarse.points_per_axis = 2;
        GridSpec fine = coarse;
        fine.points_per_axis = 3;
        EXPECT_GE(upper_bound(sc, fine, cfg).best.final_rate(), upper_bound(sc, coarse, cfg).best.final_rate());
    }
}

TEST(UpperBound, IncumbentInjectionBoundsProposed)
{
    for (std::uint64_t seed = 40; seed < 43; ++seed)
    {
        const ChannelScenario sc = sample_scenario(nominal(), seed);
        SolverConfig cfg;
        cfg.init_seed = seed;
        const RunResult ma = solve_ma_sub(sc, cfg);
        GridSpec grid;
        grid.points_per_axis = 2;
        grid.max_cycles = 2;
        const UpperBoundResult ub = upper_bound(sc, grid, cfg, &ma);
        EXPECT_TRUE(ub.incumbent_injected);
        EXPECT_GE(ub.best.final_rate(), ma.final_rate() - 1e-6);
        EXPECT_TRUE(sc.geometry.feasible(ub.best.centers));
    }
}
