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

#ifndef MAHB_ANALOG_HPP
#define MAHB_ANALOG_HPP

#include "slack.hpp"

#include <algorithm>
#include <vector>

namespace mahb
{
    // Penalty weight schedule: eta_t = scale * min(initial_factor * growth^t, max_factor),
    // where scale = sum_k mu_k ||h~_{k,k}||^2 / n_phases is the data-term magnitude.
    struct PenaltySchedule
    {
        double initial_factor = 1e-2;
        double growth = 5.0;
        double max_factor = 1e6;
        int inner_iterations = 10;

        double factor(int outer_iteration) const
        {
            double f = initial_factor;
            for (int t = 0; t < outer_iteration && f < max_factor; ++t)
                f *= growth;
            return std::min(f, max_factor);
        }
    };

    // Analog subproblem over the stacked phase-shifter vector p~ for fixed W_D and slack:
    //
    //   f(phi) = sum_k -mu_k sum_k' |h~_{k,k'}^H phi|^2 + 2Re{beta~_k^H phi}
    //
    // with h~_{k,k'}^H p~ = h_k^H W_A w_{k'} and beta~_k = (1+gamma_k) omega_k h~_{k,k}.
    struct AnalogSubproblem
    {
        CMatrix lifted; // column k*K + k' holds h~_{k,k'}
        RVector mu;
        CVector linear; // sum_k beta~_k
        int users = 0;

        Eigen::Index size() const { return lifted.rows(); }

        auto lifted_column(int k, int kp) const { return lifted.col(static_cast<Eigen::Index>(k) * users + kp); }

        double data_scale() const
        {
            double acc = 0.0;
            for (int k = 0; k < users; ++k)
                acc += mu(k) * lifted_column(k, k).squaredNorm();
            return acc / static_cast<double>(std::max<Eigen::Index>(1, size()));
        }

        double objective(const CVector &phi) const
        {
            const CVector proj = lifted.adjoint() * phi;
            double acc = 2.0 * std::real(linear.dot(phi));
            for (int k = 0; k < users; ++k)
                for (int kp = 0; kp < users; ++kp)
                    acc -= mu(k) * std::norm(proj(static_cast<Eigen::Index>(k) * users + kp));
            return acc;
        }

        double penalized(const CVector &phi, const CVector &p, double eta) const
        {
            return objective(phi) - eta * (phi - p).squaredNorm();
        }

        // Xi~ without the eta I term.
        CMatrix quadratic() const
        {
            RVector w(lifted.cols());
            for (int k = 0; k < users; ++k)
                for (int kp = 0; kp < users; ++kp)
                    w(static_cast<Eigen::Index>(k) * users + kp) = mu(k);
            return lifted * w.asDiagonal() * lifted.adjoint();
        }
    };

    inline AnalogSubproblem analog_subproblem(const CMatrix &channels, const CMatrix &digital, Connectivity connectivity,
                                              const ArrayGeometry &geometry, const SlackState &slack)
    {
        const int K = static_cast<int>(channels.cols());
        const Eigen::Index N = geometry.num_antennas();
        const Eigen::Index M = geometry.antennas_per_subarray();
        const Eigen::Index S = geometry.num_subarrays();
        AnalogSubproblem a;
        a.users = K;
        a.mu = slack.mu();
        const Eigen::Index n = connectivity == Connectivity::sub_connected ? N : N * S;
        a.lifted.resize(n, static_cast<Eigen::Index>(K) * K);
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
            {
                auto col = a.lifted.col(static_cast<Eigen::Index>(k) * K + kp);
                if (connectivity == Connectivity::sub_connected)
                {
                    for (Eigen::Index s = 0; s < S; ++s)
                        col.segment(s * M, M) = std::conj(digital(s, kp)) * channels.col(k).segment(s * M, M);
                }
                else
                {
                    for (Eigen::Index s = 0; s < S; ++s)
                        col.segment(s * N, N) = std::conj(digital(s, kp)) * channels.col(k);
                }
            }
        a.linear = CVector::Zero(n);
        const CVector scale = slack.beta_scale();
        for (int k = 0; k < K; ++k)
            a.linear += scale(k) * a.lifted_column(k, k);
        return a;
    }

    struct AnalogSolution
    {
        RVector phases;
        double eta = 0.0;
        std::vector<double> penalized_trace; // after each phi/projection pair
    };

    // Alternates phi = (Xi~ + eta I)^{-1}(beta~ + eta p~) and p~ = exp(j arg phi).
    // Block-coordinate ascent on the penalized objective, so the trace is non-decreasing.
    // Stops early once no phase moves by more than `tolerance` (0 runs the full budget).
    inline AnalogSolution solve_analog(const AnalogSubproblem &a, const RVector &phases, double eta, int inner_iterations,
                                       double tolerance = 0.0)
    {
        if (!(eta > 0.0))
            throw ConfigError("analog solve: penalty weight must be positive");
        if (phases.size() != a.size())
            throw ConfigError("analog solve: phase count does not match the subproblem");

        CMatrix system = a.quadratic();
        system.diagonal().array() += eta;
        const Eigen::LLT<CMatrix> llt(system);
        if (llt.info() != Eigen::Success)
            throw RuntimeFailure("analog solve: penalized system is not positive definite");

        AnalogSolution out{phases, eta, {}};
        CVector p = unit_modulus(phases);
        for (int it = 0; it < inner_iterations; ++it)
        {
            const CVector phi = llt.solve(a.linear + eta * p);
            const CVector prev = p;
            out.phases = project_unit_modulus(phi);
            p = unit_modulus(out.phases);
            out.penalized_trace.push_back(a.penalized(phi, p, eta));
            if (tolerance > 0.0 && (p - prev).cwiseAbs().maxCoeff() <= tolerance)
                break;
        }
        return out;
    }

    struct ContinuationOptions
    {
        int max_inner = 100;          // alternations per penalty level
        double tolerance = 1e-10;     // largest entry change that ends a level
        bool unconstrained_start = true;
    };

    // Standalone analog solve: walks the whole penalty schedule from eta_0 to the cap,
    // each level run to a fixed point. Starts from `phases` and, optionally, from the
    // projection of the unconstrained maximiser Xi~^{-1} beta~; returns the best iterate
    // seen under the analog objective.
    inline RVector solve_analog_continuation(const AnalogSubproblem &a, const RVector &phases, const PenaltySchedule &schedule,
                                             const ContinuationOptions &opt = {})
    {
        const double scale = a.data_scale() > 0.0 ? a.data_scale() : 1.0;
        int levels = 1;
        while (schedule.factor(levels) > schedule.factor(levels - 1))
            ++levels;

        std::vector<RVector> starts{phases};
        if (opt.unconstrained_start)
        {
            CMatrix q = a.quadratic();
            q.diagonal().array() += 1e-9 * scale;
            starts.push_back(project_unit_modulus(q.ldlt().solve(a.linear)));
        }

        RVector best = phases;
        double best_value = a.objective(unit_modulus(phases));
        for (RVector p : starts)
            for (int t = 0; t < levels; ++t)
            {
                p = solve_analog(a, p, scale * schedule.factor(t), opt.max_inner, opt.tolerance).phases;
                const double v = a.objective(unit_modulus(p));
                if (v > best_value)
                {
                    best_value = v;
                    best = p;
                }
            }
        return best;
    }
}

#endif
