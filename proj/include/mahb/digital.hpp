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

#ifndef MAHB_DIGITAL_HPP
#define MAHB_DIGITAL_HPP

#include "slack.hpp"

#include <optional>

namespace mahb
{
    struct BisectionOptions
    {
        double relative_tolerance = 1e-6; // on the power mismatch
        int max_iterations = 200;
    };

    // max_W  sum_k 2Re{beta_k^H w_k} - sum_k mu_k sum_k' |xi_k^H w_k'|^2
    // s.t.   tr(W^H A W) <= budget
    //
    // For the sub-connected array A = I and budget = P_max / (N_h N_v);
    // the fully-connected baseline uses A = W_A^H W_A and budget = P_max.
    struct DigitalSubproblem
    {
        CMatrix quadratic;             // Xi = sum_k mu_k xi_k xi_k^H, S x S
        CMatrix linear;                // columns beta_k, S x K
        std::optional<CMatrix> metric; // A; identity when empty
        double budget = 0.0;
    };

    struct DigitalSolution
    {
        CMatrix digital;
        double multiplier = 0.0; // lambda
        int iterations = 0;      // bisection steps
        double power = 0.0;      // tr(W^H A W)
    };

    // xi_k = W_A^H h_k and beta_k = (1 + gamma_k) omega_k xi_k.
    inline DigitalSubproblem digital_subproblem(const CMatrix &channels, const HybridBeamformer &bf,
                                                const ArrayGeometry &geometry, const SlackState &slack)
    {
        CMatrix xi;
        DigitalSubproblem p;
        if (bf.connectivity == Connectivity::sub_connected)
        {
            xi = apply_block_structure(bf.phases, geometry).apply_adjoint(channels);
            p.budget = bf.power_budget / geometry.antennas_per_subarray();
        }
        else
        {
            const CMatrix wa = bf.analog_matrix(geometry);
            xi = wa.adjoint() * channels;
            p.metric = wa.adjoint() * wa;
            p.budget = bf.power_budget;
        }
        const RVector mu = slack.mu();
        p.quadratic = xi * mu.asDiagonal() * xi.adjoint();
        p.quadratic = 0.5 * (p.quadratic + p.quadratic.adjoint()).eval();
        p.linear = xi * slack.beta_scale().asDiagonal();
        return p;
    }

    namespace detail
    {
        // Spectral form of (Xi + lambda A)^{-1} B on the range of Xi:
        // with Xi V = A V diag(e), V^H A V = I, the solution is V diag(1/(e+lambda)) V^H B
        // and its A-weighted power is sum_i |c_i|^2 / (e_i + lambda)^2, c = V^H B.
        struct SpectralDigital
        {
            CMatrix basis;    // V restricted to retained directions
            RVector values;   // e_i
            CMatrix coeffs;   // rows of V^H B
            RVector weights;  // row norms squared of coeffs

            explicit SpectralDigital(const DigitalSubproblem &p)
            {
                const Eigen::Index n = p.quadratic.rows();
                CMatrix v;
                RVector e;
                if (p.metric)
                {
                    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(p.quadratic, *p.metric, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
                    if (es.info() != Eigen::Success)
                        throw RuntimeFailure("digital solve: power metric is not positive definite");
                    v = es.eigenvectors();
                    e = es.eigenvalues();
                }
                else
                {
                    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.quadratic);
                    if (es.info() != Eigen::Success)
                        throw RuntimeFailure("digital solve: eigendecomposition failed");
                    v = es.eigenvectors();
                    e = es.eigenvalues();
                }
                const double top = n > 0 ? e.cwiseAbs().maxCoeff() : 0.0;
                const double cut = 1e-12 * top;
                std::vector<Eigen::Index> keep;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (e(i) > cut)
                        keep.push_back(i);
                const auto m = static_cast<Eigen::Index>(keep.size());
                basis.resize(n, m);
                values.resize(m);
                for (Eigen::Index j = 0; j < m; ++j)
                {
                    basis.col(j) = v.col(keep[static_cast<std::size_t>(j)]);
                    values(j) = e(keep[static_cast<std::size_t>(j)]);
                }
                coeffs = basis.adjoint() * p.linear;
                weights = coeffs.rowwise().squaredNorm();
            }

            double power(double lambda) const
            {
                double acc = 0.0;
                for (Eigen::Index i = 0; i < values.size(); ++i)
                {
                    const double d = values(i) + lambda;
                    acc += weights(i) / (d * d);
                }
                return acc;
            }

            CMatrix solution(double lambda) const
            {
                RVector inv(values.size());
                for (Eigen::Index i = 0; i < values.size(); ++i)
                    inv(i) = 1.0 / (values(i) + lambda);
                return basis * (inv.asDiagonal() * coeffs);
            }
        };
    }

    // w_k = (Xi + lambda A)^{-1} beta_k with lambda = 0 when that already meets the budget,
    // otherwise the smallest-mismatch feasible lambda found by bisection.
    // The returned matrix always satisfies the budget.
    inline DigitalSolution solve_digital(const DigitalSubproblem &p, const BisectionOptions &opt = {})
    {
        if (!(p.budget > 0.0))
            throw ConfigError("digital solve: power budget must be positive");
        const detail::SpectralDigital sp(p);
        DigitalSolution out;

        const double p0 = sp.power(0.0);
        if (p0 <= p.budget)
        {
            out.digital = sp.solution(0.0);
            out.power = p0;
            return out;
        }

        // power(lambda) is sandwiched by |c|^2/(e_max+lambda)^2 and |c|^2/(e_min+lambda)^2.
        const double cnorm = std::sqrt(sp.weights.sum());
        const double e_min = sp.values.minCoeff();
        const double e_max = sp.values.maxCoeff();
        double lo = std::max(0.0, cnorm / std::sqrt(p.budget) - e_max);
        double hi = std::max(lo, cnorm / std::sqrt(p.budget) - e_min);
        while (sp.power(hi) > p.budget)
            hi = hi > 0.0 ? 2.0 * hi : 1.0;

        int it = 0;
        for (; it < opt.max_iterations; ++it)
        {
            if ((p.budget - sp.power(hi)) <= opt.relative_tolerance * p.budget)
                break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (sp.power(mid) > p.budget)
                lo = mid;
            else
                hi = mid;
        }
        out.multiplier = hi;
        out.iterations = it;
        out.digital = sp.solution(hi);
        out.power = sp.power(hi);
        return out;
    }
}

#endif
