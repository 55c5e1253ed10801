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

#ifndef MAHB_ORCHESTRATOR_HPP
#define MAHB_ORCHESTRATOR_HPP

#include "analog.hpp"
#include "digital.hpp"
#include "positioning.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <vector>

namespace mahb
{
    struct SolverConfig
    {
        double power_budget = dbm_to_watts(10.0); // P_max [W]
        double tolerance = 1e-3;                  // epsilon on the absolute sum-rate change
        int max_iterations = 200;                 // I_max
        PositionStepConfig step;
        PenaltySchedule penalty;
        BisectionOptions bisection;
        std::uint64_t init_seed = 0;
        bool move_subarrays = true;
        Connectivity connectivity = Connectivity::sub_connected;
        int restarts = 1;

        void validate() const
        {
            if (!(power_budget > 0.0))
                throw ConfigError("solver: power budget must be positive");
            if (!(tolerance > 0.0))
                throw ConfigError("solver: tolerance must be positive");
            if (max_iterations < 1)
                throw ConfigError("solver: max iterations must be >= 1");
            if (restarts < 1)
                throw ConfigError("solver: restarts must be >= 1");
            if (penalty.inner_iterations < 1 || !(penalty.initial_factor > 0.0) || !(penalty.growth >= 1.0))
                throw ConfigError("solver: invalid penalty schedule");
            if (connectivity == Connectivity::fully_connected && move_subarrays)
                throw ConfigError("solver: sub-array movement requires the sub-connected structure");
            step.validate();
        }
    };

    struct SolverState
    {
        SubArrayCenters centers;
        HybridBeamformer beamformer;
        SlackState slack;
        int iteration = 0; // completed outer iterations
    };

    struct IterationRecord
    {
        int iteration = 0;
        double surrogate = 0.0; // nats, at the slack used during the iteration
        double sum_rate = 0.0;  // bit/s/Hz at the end of the iteration
        RVector sinr;
        double multiplier = 0.0; // lambda of the digital step
        double eta = 0.0;        // penalty weight of the analog step
        bool analog_accepted = false;
        SubArrayCenters centers;
    };

    enum class Termination
    {
        converged,
        max_iterations
    };

    inline const char *to_string(Termination t) { return t == Termination::converged ? "converged" : "max-iterations"; }

    struct RunResult
    {
        HybridBeamformer beamformer;
        SubArrayCenters centers;
        double initial_rate = 0.0;
        std::vector<double> rate_trace;      // bit/s/Hz, one per iteration
        std::vector<double> surrogate_trace; // nats, one per iteration
        int iterations = 0;
        Termination termination = Termination::max_iterations;
        double seconds = 0.0;

        double final_rate() const { return rate_trace.empty() ? initial_rate : rate_trace.back(); }
    };

    using IterationObserver = std::function<void(const IterationRecord &, const SolverState &)>;

    // Frame-centred sub-arrays, uniformly random phases and matched-filter digital
    // columns scaled to use the whole budget.
    inline SolverState initialize(const ChannelScenario &scenario, const SolverConfig &cfg, const SubArrayCenters &centers)
    {
        cfg.validate();
        const ArrayGeometry &g = scenario.geometry;
        if (!g.feasible(centers))
            throw ConfigError("initialize: centers violate the movable regions");
        SolverState st;
        st.centers = centers;

        HybridBeamformer &bf = st.beamformer;
        bf.connectivity = cfg.connectivity;
        bf.power_budget = cfg.power_budget;
        std::mt19937_64 rng(cfg.init_seed);
        std::uniform_real_distribution<double> phase(0.0, kTwoPi);
        bf.phases.resize(HybridBeamformer::phase_count(cfg.connectivity, g));
        for (Eigen::Index i = 0; i < bf.phases.size(); ++i)
            bf.phases(i) = wrap_phase(phase(rng));

        const CMatrix H = channel_matrix(st.centers, scenario);
        bf.digital = CMatrix::Zero(g.num_subarrays(), H.cols());
        bf.digital = bf.analog_matrix(g).adjoint() * H;
        const double p = bf.transmit_power(g);
        if (p > 0.0)
            bf.digital *= std::sqrt(cfg.power_budget / p);
        st.slack = update_slack(H, bf.precoder(g), scenario.noise_powers());
        return st;
    }

    inline SolverState initialize(const ChannelScenario &scenario, const SolverConfig &cfg)
    {
        return initialize(scenario, cfg, scenario.geometry.frame_centers());
    }

    // Resumes from a given beamformer and centers; slack is refreshed.
    inline SolverState warm_state(const ChannelScenario &scenario, const SubArrayCenters &centers, const HybridBeamformer &bf)
    {
        bf.check(scenario.geometry);
        if (!scenario.geometry.feasible(centers))
            throw ConfigError("warm start: centers violate the movable regions");
        SolverState st{centers, bf, {}, 0};
        st.slack = update_slack(channel_matrix(centers, scenario), bf.precoder(scenario.geometry), scenario.noise_powers());
        return st;
    }

    // One outer iteration: slack, digital, analog, positions, then rate evaluation.
    // The analog candidate is kept only if it does not lower the surrogate, which keeps
    // the whole iteration monotone.
    inline IterationRecord ao_iterate(const ChannelScenario &scenario, std::span<const TransmitResponse> responses,
                                      const SolverConfig &cfg, SolverState &st)
    {
        const ArrayGeometry &g = scenario.geometry;
        const RVector noise = scenario.noise_powers();
        HybridBeamformer &bf = st.beamformer;
        IterationRecord rec;
        rec.iteration = st.iteration + 1;

        const CMatrix H = channel_matrix(st.centers, responses, g);
        st.slack = update_slack(H, bf.precoder(g), noise);

        const DigitalSolution ds = solve_digital(digital_subproblem(H, bf, g, st.slack), cfg.bisection);
        bf.digital = ds.digital;
        rec.multiplier = ds.multiplier;

        const AnalogSubproblem as = analog_subproblem(H, bf.digital, bf.connectivity, g, st.slack);
        const double scale = as.data_scale();
        rec.eta = (scale > 0.0 ? scale : 1.0) * cfg.penalty.factor(st.iteration);
        const AnalogSolution sol = solve_analog(as, bf.phases, rec.eta, cfg.penalty.inner_iterations);

        HybridBeamformer cand = bf;
        cand.phases = sol.phases;
        if (cand.connectivity == Connectivity::fully_connected)
        {
            const double p = cand.transmit_power(g);
            if (p > cand.power_budget)
                cand.digital *= std::sqrt(cand.power_budget / p);
        }
        const double before = surrogate_value(H, bf.precoder(g), noise, st.slack);
        const double after = surrogate_value(H, cand.precoder(g), noise, st.slack);
        if (after >= before)
        {
            bf = std::move(cand);
            rec.analog_accepted = true;
        }

        if (cfg.move_subarrays)
            st.centers = sweep_all_centers(scenario, responses, st.centers, bf, st.slack, cfg.step);

        const CMatrix gains = link_gains(channel_matrix(st.centers, responses, g), bf.precoder(g));
        rec.surrogate = surrogate_value(gains, noise, st.slack);
        rec.sinr = sinr(gains, noise);
        rec.sum_rate = sum_rate(gains, noise);
        rec.centers = st.centers;
        ++st.iteration;
        return rec;
    }

    inline IterationRecord ao_iterate(const ChannelScenario &scenario, const SolverConfig &cfg, SolverState &st)
    {
        const auto resp = transmit_responses(scenario);
        return ao_iterate(scenario, resp, cfg, st);
    }

    // Runs outer iterations from `st` until |R(t) - R(t-1)| < epsilon or I_max.
    inline RunResult solve_from(const ChannelScenario &scenario, const SolverConfig &cfg, SolverState st,
                                const IterationObserver &observer = {})
    {
        cfg.validate();
        const auto t0 = std::chrono::steady_clock::now();
        const auto resp = transmit_responses(scenario);
        RunResult out;
        out.initial_rate = sum_rate(link_gains(channel_matrix(st.centers, resp, scenario.geometry),
                                               st.beamformer.precoder(scenario.geometry)),
                                    scenario.noise_powers());
        double prev = out.initial_rate;
        for (int t = 0; t < cfg.max_iterations; ++t)
        {
            IterationRecord rec = ao_iterate(scenario, resp, cfg, st);
            out.rate_trace.push_back(rec.sum_rate);
            out.surrogate_trace.push_back(rec.surrogate);
            ++out.iterations;
            if (observer)
                observer(rec, st);
            if (!std::isfinite(rec.sum_rate))
                throw RuntimeFailure("solver: non-finite sum rate at iteration " + std::to_string(rec.iteration));
            if (std::abs(rec.sum_rate - prev) < cfg.tolerance)
            {
                out.termination = Termination::converged;
                break;
            }
            prev = rec.sum_rate;
        }
        out.beamformer = std::move(st.beamformer);
        out.centers = std::move(st.centers);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    inline RunResult solve(const ChannelScenario &scenario, const SolverConfig &cfg, const IterationObserver &observer = {})
    {
        return solve_from(scenario, cfg, initialize(scenario, cfg), observer);
    }

    // Best of cfg.restarts independent initialisations (seeds init_seed, init_seed+1, ...).
    inline RunResult solve_multistart(const ChannelScenario &scenario, const SolverConfig &cfg,
                                      const SubArrayCenters &centers, const IterationObserver &observer = {})
    {
        cfg.validate();
        RunResult best;
        for (int r = 0; r < cfg.restarts; ++r)
        {
            SolverConfig c = cfg;
            c.init_seed = cfg.init_seed + static_cast<std::uint64_t>(r);
            RunResult res = solve_from(scenario, c, initialize(scenario, c, centers), observer);
            if (r == 0 || res.final_rate() > best.final_rate())
            {
                const double elapsed = best.seconds;
                best = std::move(res);
                best.seconds += elapsed;
            }
            else
                best.seconds += res.seconds;
        }
        return best;
    }

    inline RunResult solve_multistart(const ChannelScenario &scenario, const SolverConfig &cfg,
                                      const IterationObserver &observer = {})
    {
        return solve_multistart(scenario, cfg, scenario.geometry.frame_centers(), observer);
    }
}

#endif
