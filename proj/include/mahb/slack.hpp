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

#ifndef MAHB_SLACK_HPP
#define MAHB_SLACK_HPP

#include "beamformer.hpp"

namespace mahb
{
    // Auxiliary variables of the quadratic transform, one pair per user.
    struct SlackState
    {
        RVector gamma;
        CVector omega;

        // mu_k = (1 + gamma_k) |omega_k|^2
        RVector mu() const
        {
            RVector m(gamma.size());
            for (Eigen::Index k = 0; k < gamma.size(); ++k)
                m(k) = (1.0 + gamma(k)) * std::norm(omega(k));
            return m;
        }

        // (1 + gamma_k) omega_k, the factor multiplying the desired-signal direction.
        CVector beta_scale() const
        {
            CVector b(gamma.size());
            for (Eigen::Index k = 0; k < gamma.size(); ++k)
                b(k) = (1.0 + gamma(k)) * omega(k);
            return b;
        }
    };

    // Optimal slack for fixed beamformer and positions:
    // gamma_k = |a_k|^2 / (interference + noise), omega_k = a_k / b_k.
    // A user with a_k = 0 gets gamma_k = omega_k = 0.
    inline SlackState update_slack(const CMatrix &gains, const RVector &noise)
    {
        const Eigen::Index K = gains.rows();
        SlackState st{RVector::Zero(K), CVector::Zero(K)};
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const Complex a = gains(k, k);
            if (a == Complex(0.0, 0.0))
                continue;
            double interference = noise(k);
            for (Eigen::Index j = 0; j < K; ++j)
                if (j != k)
                    interference += std::norm(gains(k, j));
            const double b = interference + std::norm(a);
            st.gamma(k) = std::norm(a) / interference;
            st.omega(k) = a / b;
        }
        return st;
    }

    inline SlackState update_slack(const CMatrix &channels, const CMatrix &precoder, const RVector &noise)
    {
        return update_slack(link_gains(channels, precoder), noise);
    }

    // Quadratic-transform surrogate in nats, constants included:
    // sum_k log(1+g_k) - g_k + (1+g_k)(2 Re{conj(w_k) a_k} - |w_k|^2 b_k).
    inline double surrogate_value(const CMatrix &gains, const RVector &noise, const SlackState &slack)
    {
        double total = 0.0;
        for (Eigen::Index k = 0; k < gains.rows(); ++k)
        {
            const double g = slack.gamma(k);
            const Complex w = slack.omega(k);
            const double b = noise(k) + gains.row(k).squaredNorm();
            total += std::log1p(g) - g + (1.0 + g) * (2.0 * std::real(std::conj(w) * gains(k, k)) - std::norm(w) * b);
        }
        return total;
    }

    inline double surrogate_value(const CMatrix &channels, const CMatrix &precoder, const RVector &noise,
                                  const SlackState &slack)
    {
        return surrogate_value(link_gains(channels, precoder), noise, slack);
    }
}

#endif
