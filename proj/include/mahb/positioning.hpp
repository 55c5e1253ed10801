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

#ifndef MAHB_POSITIONING_HPP
#define MAHB_POSITIONING_HPP

#include "beamformer.hpp"
#include "channel.hpp"
#include "slack.hpp"

#include <vector>

namespace mahb
{
    struct PositionStepConfig
    {
        double initial_step = 10.0; // kappa~
        double shrink = 0.5;
        int max_backtracks = 30;

        void validate() const
        {
            if (!(initial_step > 0.0))
                throw ConfigError("position step: initial step must be positive");
            if (!(shrink > 0.0 && shrink < 1.0))
                throw ConfigError("position step: shrink factor must lie in (0, 1)");
            if (max_backtracks < 1)
                throw ConfigError("position step: max backtracks must be >= 1");
        }
    };

    // Position subproblem of one sub-array s with every other block held fixed:
    //
    //   L(c) = sum_k 2Re{h_k(t_s)^H bbar_k} - mu_k sum_k' |hbar_{k,k'}(t_s)|^2
    //   hbar_{k,k'} = sum_{s'} h_k(t_{s'})^H xibar_{k',s'}
    //
    // where xibar_{k,s} = w_{k,s} p_s and bbar_k = (1+gamma_k) conj(omega_k) xibar_{k,s}.
    // The inner sum over s' runs over all sub-arrays; only the s term depends on c.
    class PositionSubproblem
    {
    public:
        PositionSubproblem(const ChannelScenario &scenario, std::span<const TransmitResponse> responses,
                           const SubArrayCenters &centers, const HybridBeamformer &bf, const SlackState &slack,
                           std::size_t subarray)
            : geometry_(&scenario.geometry), responses_(responses), subarray_(subarray), mu_(slack.mu())
        {
            if (bf.connectivity != Connectivity::sub_connected)
                throw ConfigError("position design requires the sub-connected structure");
            bf.check(scenario.geometry);
            const Eigen::Index M = geometry_->antennas_per_subarray();
            const Eigen::Index S = geometry_->num_subarrays();
            const Eigen::Index K = static_cast<Eigen::Index>(responses.size());
            const CVector p = unit_modulus(bf.phases);

            auto xibar = [&](Eigen::Index s) {
                CMatrix x(M, K);
                for (Eigen::Index k = 0; k < K; ++k)
                    x.col(k) = bf.digital(s, k) * p.segment(s * M, M);
                return x;
            };

            xi_ = xibar(static_cast<Eigen::Index>(subarray));
            beta_.resize(M, K);
            for (Eigen::Index k = 0; k < K; ++k)
                beta_.col(k) = (1.0 + slack.gamma(k)) * std::conj(slack.omega(k)) * xi_.col(k);

            rest_ = CMatrix::Zero(K, K);
            for (Eigen::Index s = 0; s < S; ++s)
            {
                if (s == static_cast<Eigen::Index>(subarray))
                    continue;
                const CMatrix x = xibar(s);
                for (Eigen::Index k = 0; k < K; ++k)
                {
                    const CVector h = subarray_channel(centers[static_cast<std::size_t>(s)], responses[static_cast<std::size_t>(k)], *geometry_);
                    rest_.row(k) += h.adjoint() * x;
                }
            }
        }

        std::size_t subarray() const { return subarray_; }
        const Region &region() const { return geometry_->region(subarray_); }

        double objective(const Point &c) const
        {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < rest_.rows(); ++k)
            {
                const CVector h = subarray_channel(c, responses_[static_cast<std::size_t>(k)], *geometry_);
                acc += 2.0 * std::real(h.dot(beta_.col(k)));
                const Eigen::RowVectorXcd hbar = rest_.row(k) + h.adjoint() * xi_;
                acc -= mu_(k) * hbar.squaredNorm();
            }
            return acc;
        }

        Point gradient(const Point &c) const
        {
            const auto &offsets = geometry_->offsets();
            const Eigen::Index M = static_cast<Eigen::Index>(offsets.size());
            CVector h(M), dx(M), dy(M);
            Point g = Point::Zero();
            for (Eigen::Index k = 0; k < rest_.rows(); ++k)
            {
                const auto &resp = responses_[static_cast<std::size_t>(k)];
                for (Eigen::Index i = 0; i < M; ++i)
                    resp.at_with_gradient(c + offsets[static_cast<std::size_t>(i)], h(i), dx(i), dy(i));
                const Eigen::RowVectorXcd hbar = rest_.row(k) + h.adjoint() * xi_;
                // d hbar_{k,k'} = dh^H xibar_{k'}; d|z|^2 = 2 Re{conj(z) dz}
                const Eigen::RowVectorXcd gx = dx.adjoint() * xi_;
                const Eigen::RowVectorXcd gy = dy.adjoint() * xi_;
                g.x() += 2.0 * std::real(dx.dot(beta_.col(k))) - 2.0 * mu_(k) * std::real(hbar.dot(gx));
                g.y() += 2.0 * std::real(dy.dot(beta_.col(k))) - 2.0 * mu_(k) * std::real(hbar.dot(gy));
            }
            return g;
        }

    private:
        const ArrayGeometry *geometry_;
        std::span<const TransmitResponse> responses_;
        std::size_t subarray_;
        RVector mu_;
        CMatrix xi_;   // xibar_{k',s}, M x K
        CMatrix beta_; // bbar_k, M x K
        CMatrix rest_; // contributions of the other sub-arrays to hbar, K x K
    };

    inline double position_objective(const ChannelScenario &scenario, const SubArrayCenters &centers,
                                     const HybridBeamformer &bf, const SlackState &slack, std::size_t subarray,
                                     const Point &c)
    {
        if (!scenario.geometry.region(subarray).contains(c))
            throw ConfigError("position objective: center lies outside its movable region");
        const auto resp = transmit_responses(scenario);
        return PositionSubproblem(scenario, resp, centers, bf, slack, subarray).objective(c);
    }

    inline Point position_gradient(const ChannelScenario &scenario, const SubArrayCenters &centers,
                                   const HybridBeamformer &bf, const SlackState &slack, std::size_t subarray,
                                   const Point &c)
    {
        const auto resp = transmit_responses(scenario);
        return PositionSubproblem(scenario, resp, centers, bf, slack, subarray).gradient(c);
    }

    struct StepOutcome
    {
        Point center;
        double objective_before = 0.0;
        double objective_after = 0.0;
        int backtracks = 0;
        bool accepted = false;
    };

    // One gradient step with halving: accept c + kappa*grad only if it stays in the region
    // and does not decrease L; otherwise keep c.
    inline StepOutcome descend_center(const PositionSubproblem &sub, const Point &c, const PositionStepConfig &cfg)
    {
        const double base = sub.objective(c);
        StepOutcome out{c, base, base, 0, false};
        const Point g = sub.gradient(c);
        double kappa = cfg.initial_step;
        for (int b = 0; b < cfg.max_backtracks; ++b)
        {
            const Point cand = c + kappa * g;
            kappa *= cfg.shrink;
            if (sub.region().contains(cand))
            {
                const double val = sub.objective(cand);
                if (val >= base)
                {
                    out.center = cand;
                    out.objective_after = val;
                    out.accepted = true;
                    return out;
                }
            }
            out.backtracks = b + 1;
        }
        return out;
    }

    // One Gauss-Seidel pass over the sub-arrays in row-major order.
    inline SubArrayCenters sweep_all_centers(const ChannelScenario &scenario, std::span<const TransmitResponse> responses,
                                             SubArrayCenters centers, const HybridBeamformer &bf,
                                             const SlackState &slack, const PositionStepConfig &cfg,
                                             std::vector<StepOutcome> *outcomes = nullptr)
    {
        for (std::size_t s = 0; s < centers.size(); ++s)
        {
            const PositionSubproblem sub(scenario, responses, centers, bf, slack, s);
            const StepOutcome o = descend_center(sub, centers[s], cfg);
            centers[s] = o.center;
            if (outcomes)
                outcomes->push_back(o);
        }
        return centers;
    }

    inline SubArrayCenters sweep_all_centers(const ChannelScenario &scenario, SubArrayCenters centers,
                                             const HybridBeamformer &bf, const SlackState &slack,
                                             const PositionStepConfig &cfg)
    {
        const auto resp = transmit_responses(scenario);
        return sweep_all_centers(scenario, resp, std::move(centers), bf, slack, cfg);
    }
}

#endif
