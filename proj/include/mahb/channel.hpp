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

#ifndef MAHB_CHANNEL_HPP
#define MAHB_CHANNEL_HPP

#include "geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mahb
{
    // Elevation/azimuth pair of one propagation path [rad].
    struct PathAngle
    {
        double elevation = 0.0;
        double azimuth = 0.0;

        // rho = [sin(theta) cos(phi), cos(theta)]
        Point direction() const { return {std::sin(elevation) * std::cos(azimuth), std::cos(elevation)}; }
        bool operator==(const PathAngle &) const = default;
    };

    // Multipath description of one single-antenna user.
    struct PathSet
    {
        std::vector<PathAngle> transmit;
        std::vector<PathAngle> receive;
        Point receive_position = Point::Zero(); // r_k [m]
        CMatrix response;                       // Sigma_k, L_t x L_r
        double noise_power = 0.0;               // sigma_k^2 [W]

        std::size_t num_transmit_paths() const { return transmit.size(); }
        std::size_t num_receive_paths() const { return receive.size(); }
    };

    struct ChannelScenario
    {
        ArrayGeometry geometry;
        std::vector<PathSet> users;
        std::uint64_t seed = 0;

        int num_users() const { return static_cast<int>(users.size()); }
        RVector noise_powers() const
        {
            RVector out(users.size());
            for (std::size_t k = 0; k < users.size(); ++k)
                out(static_cast<Eigen::Index>(k)) = users[k].noise_power;
            return out;
        }
    };

    // Field-response vector at position t: entry l = exp(j 2pi/lambda t^T rho_l).
    inline CVector frv_transmit(const Point &t, std::span<const PathAngle> paths, double wavelength)
    {
        const double k0 = kTwoPi / wavelength;
        CVector g(static_cast<Eigen::Index>(paths.size()));
        for (std::size_t l = 0; l < paths.size(); ++l)
            g(static_cast<Eigen::Index>(l)) = unit_phasor(k0 * t.dot(paths[l].direction()));
        return g;
    }

    inline CVector frv_receive(const PathSet &user, double wavelength)
    {
        return frv_transmit(user.receive_position, user.receive, wavelength);
    }

    // Transmit-side view of a user: path directions and the folded weights Sigma_k f_k.
    // h(t) = sum_l conj(exp(j k0 t^T rho_l)) * weight_l.
    struct TransmitResponse
    {
        std::vector<Point> directions;
        CVector weights;
        double wave_number = 0.0;

        TransmitResponse() = default;
        TransmitResponse(const PathSet &user, double wavelength)
        {
            if (user.response.rows() != static_cast<Eigen::Index>(user.transmit.size()) ||
                user.response.cols() != static_cast<Eigen::Index>(user.receive.size()))
                throw ConfigError("path-response matrix must be L_t x L_r");
            wave_number = kTwoPi / wavelength;
            directions.reserve(user.transmit.size());
            for (const auto &a : user.transmit)
                directions.push_back(a.direction());
            weights = user.response * frv_receive(user, wavelength);
        }

        Complex at(const Point &t) const
        {
            Complex acc(0.0, 0.0);
            for (std::size_t l = 0; l < directions.size(); ++l)
                acc += std::conj(unit_phasor(wave_number * t.dot(directions[l]))) * weights(static_cast<Eigen::Index>(l));
            return acc;
        }

        // Value and partial derivatives along x and y.
        void at_with_gradient(const Point &t, Complex &value, Complex &dx, Complex &dy) const
        {
            value = dx = dy = Complex(0.0, 0.0);
            for (std::size_t l = 0; l < directions.size(); ++l)
            {
                const Complex term = std::conj(unit_phasor(wave_number * t.dot(directions[l]))) * weights(static_cast<Eigen::Index>(l));
                const Complex dphase(0.0, -wave_number);
                value += term;
                dx += dphase * directions[l].x() * term;
                dy += dphase * directions[l].y() * term;
            }
        }
    };

    // h_k(t_{m,n}) = G_k(t_{m,n})^H Sigma_k f_k for one sub-array centred at `center`.
    inline CVector subarray_channel(const Point &center, const TransmitResponse &resp, const ArrayGeometry &geometry)
    {
        const auto &offsets = geometry.offsets();
        CVector h(static_cast<Eigen::Index>(offsets.size()));
        for (std::size_t i = 0; i < offsets.size(); ++i)
            h(static_cast<Eigen::Index>(i)) = resp.at(center + offsets[i]);
        return h;
    }

    inline CVector subarray_channel(const Point &center, const PathSet &user, const ArrayGeometry &geometry)
    {
        return subarray_channel(center, TransmitResponse(user, geometry.wavelength()), geometry);
    }

    // Stacked channel h_k(c) over all sub-arrays in row-major order.
    inline CVector full_channel(const SubArrayCenters &centers, const TransmitResponse &resp, const ArrayGeometry &geometry)
    {
        if (centers.size() != static_cast<std::size_t>(geometry.num_subarrays()))
            throw ConfigError("full_channel: center count does not match the sub-array grid");
        const Eigen::Index M = geometry.antennas_per_subarray();
        CVector h(geometry.num_antennas());
        for (std::size_t s = 0; s < centers.size(); ++s)
            h.segment(static_cast<Eigen::Index>(s) * M, M) = subarray_channel(centers[s], resp, geometry);
        return h;
    }

    inline CVector full_channel(const SubArrayCenters &centers, const PathSet &user, const ArrayGeometry &geometry)
    {
        return full_channel(centers, TransmitResponse(user, geometry.wavelength()), geometry);
    }

    inline std::vector<TransmitResponse> transmit_responses(const ChannelScenario &scenario)
    {
        std::vector<TransmitResponse> out;
        out.reserve(scenario.users.size());
        for (const auto &u : scenario.users)
            out.emplace_back(u, scenario.geometry.wavelength());
        return out;
    }

    // N x K matrix whose k-th column is h_k(c).
    inline CMatrix channel_matrix(const SubArrayCenters &centers, std::span<const TransmitResponse> responses,
                                  const ArrayGeometry &geometry)
    {
        CMatrix H(geometry.num_antennas(), static_cast<Eigen::Index>(responses.size()));
        for (std::size_t k = 0; k < responses.size(); ++k)
            H.col(static_cast<Eigen::Index>(k)) = full_channel(centers, responses[k], geometry);
        return H;
    }

    inline CMatrix channel_matrix(const SubArrayCenters &centers, const ChannelScenario &scenario)
    {
        const auto responses = transmit_responses(scenario);
        return channel_matrix(centers, responses, scenario.geometry);
    }
}

#endif
