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

#ifndef MAHB_BEAMFORMER_HPP
#define MAHB_BEAMFORMER_HPP

#include "geometry.hpp"

namespace mahb
{
    enum class Connectivity
    {
        sub_connected,  // RF chain s drives only the antennas of sub-array s
        fully_connected // every RF chain drives every antenna
    };

    inline CVector unit_modulus(const RVector &phases)
    {
        CVector out(phases.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i)
            out(i) = unit_phasor(phases(i));
        return out;
    }

    // Closest unit-modulus vector to phi, returned as phases in [0, 2pi).
    // arg{0} is taken as 0.
    inline RVector project_unit_modulus(const CVector &phi)
    {
        RVector out(phi.size());
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            out(i) = phi(i) == Complex(0.0, 0.0) ? 0.0 : wrap_phase(std::arg(phi(i)));
        return out;
    }

    // Block-diagonal sub-connected analog precoder W_A = diag(p_1, ..., p_S).
    // Never materialises the N x S matrix unless asked.
    class AnalogOperator
    {
    public:
        AnalogOperator(const RVector &phases, int blocks, int block_size)
            : weights_(unit_modulus(phases)), blocks_(blocks), block_size_(block_size)
        {
            if (phases.size() != static_cast<Eigen::Index>(blocks) * block_size)
                throw ConfigError("AnalogOperator: phase count must equal the antenna count");
        }

        int rows() const { return blocks_ * block_size_; }
        int cols() const { return blocks_; }
        const CVector &weights() const { return weights_; }

        // y = W_A x, x in C^{S x c}
        CMatrix apply(const CMatrix &x) const
        {
            CMatrix y(rows(), x.cols());
            for (int s = 0; s < blocks_; ++s)
                for (Eigen::Index c = 0; c < x.cols(); ++c)
                    y.col(c).segment(s * block_size_, block_size_) = weights_.segment(s * block_size_, block_size_) * x(s, c);
            return y;
        }

        // x = W_A^H y, y in C^{N x c}
        CMatrix apply_adjoint(const CMatrix &y) const
        {
            CMatrix x(blocks_, y.cols());
            for (int s = 0; s < blocks_; ++s)
                for (Eigen::Index c = 0; c < y.cols(); ++c)
                    x(s, c) = weights_.segment(s * block_size_, block_size_).dot(y.col(c).segment(s * block_size_, block_size_));
            return x;
        }

        CMatrix dense() const
        {
            CMatrix a = CMatrix::Zero(rows(), cols());
            for (int s = 0; s < blocks_; ++s)
                a.col(s).segment(s * block_size_, block_size_) = weights_.segment(s * block_size_, block_size_);
            return a;
        }

    private:
        CVector weights_;
        int blocks_;
        int block_size_;
    };

    inline AnalogOperator apply_block_structure(const RVector &phases, const ArrayGeometry &geometry)
    {
        return AnalogOperator(phases, geometry.num_subarrays(), geometry.antennas_per_subarray());
    }

    // Analog phases plus digital matrix under a total power budget.
    //
    // Sub-connected: `phases` has N entries, antenna order as in the stacked channel.
    // Fully-connected: `phases` has N * S entries, column-major over the N x S analog matrix.
    struct HybridBeamformer
    {
        Connectivity connectivity = Connectivity::sub_connected;
        RVector phases;
        CMatrix digital; // S x K
        double power_budget = 0.0;

        static Eigen::Index phase_count(Connectivity c, const ArrayGeometry &g)
        {
            return c == Connectivity::sub_connected ? g.num_antennas()
                                                    : static_cast<Eigen::Index>(g.num_antennas()) * g.num_subarrays();
        }

        void check(const ArrayGeometry &g) const
        {
            if (phases.size() != phase_count(connectivity, g))
                throw ConfigError("HybridBeamformer: phase count does not match the geometry");
            if (digital.rows() != g.num_subarrays())
                throw ConfigError("HybridBeamformer: digital matrix must have one row per RF chain");
        }

        CMatrix analog_matrix(const ArrayGeometry &g) const
        {
            check(g);
            if (connectivity == Connectivity::sub_connected)
                return apply_block_structure(phases, g).dense();
            return unit_modulus(phases).reshaped(g.num_antennas(), g.num_subarrays());
        }

        // W_A W_D, N x K
        CMatrix precoder(const ArrayGeometry &g) const
        {
            check(g);
            if (connectivity == Connectivity::sub_connected)
                return apply_block_structure(phases, g).apply(digital);
            return analog_matrix(g) * digital;
        }

        double transmit_power(const ArrayGeometry &g) const { return precoder(g).squaredNorm(); }
    };

    // (k, k') entry is h_k^H W_A w_{k'}.
    inline CMatrix link_gains(const CMatrix &channels, const CMatrix &precoder) { return channels.adjoint() * precoder; }

    inline RVector sinr(const CMatrix &gains, const RVector &noise)
    {
        const Eigen::Index K = gains.rows();
        RVector out(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double interference = noise(k);
            for (Eigen::Index j = 0; j < K; ++j)
                if (j != k)
                    interference += std::norm(gains(k, j));
            const double signal = std::norm(gains(k, k));
            out(k) = signal == 0.0 ? 0.0 : signal / interference;
        }
        return out;
    }

    // sum_k log2(1 + SINR_k) [bit/s/Hz]
    inline double sum_rate(const CMatrix &gains, const RVector &noise)
    {
        const RVector s = sinr(gains, noise);
        double r = 0.0;
        for (Eigen::Index k = 0; k < s.size(); ++k)
            r += std::log2(1.0 + s(k));
        return r;
    }
}

#endif
