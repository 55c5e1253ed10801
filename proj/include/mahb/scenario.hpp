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

#ifndef MAHB_SCENARIO_HPP
#define MAHB_SCENARIO_HPP

#include "channel.hpp"

#include <random>

namespace mahb
{
    // How the per-path variance is derived from the large-scale gain g = rho0 * d^-alpha.
    enum class GainConvention
    {
        amplitude_squared, // var = g^2 / L  (default)
        power              // var = g / L
    };

    struct ScenarioConfig
    {
        GeometryParams geometry;
        int users = 4;
        int paths = 6;                  // L = L_t = L_r
        double reference_gain_db = -40; // rho0 at 1 m
        double pathloss_exponent = 2.8;
        double distance_min = 20.0;     // [m]
        double distance_max = 100.0;    // [m]
        double noise_dbm = -80.0;
        GainConvention gain_convention = GainConvention::amplitude_squared;

        void validate() const
        {
            if (users < 1)
                throw ConfigError("scenario: user count must be >= 1");
            if (paths < 1)
                throw ConfigError("scenario: path count must be >= 1");
            if (!(distance_min > 0.0) || distance_max < distance_min)
                throw ConfigError("scenario: invalid distance bounds");
            if (!std::isfinite(reference_gain_db) || !std::isfinite(noise_dbm) || !std::isfinite(pathloss_exponent))
                throw ConfigError("scenario: gains and noise must be finite");
        }
    };

    // Per-path variance of sigma_{k,l} at distance d.
    inline double path_variance(const ScenarioConfig &cfg, double distance)
    {
        const double g = db_to_linear(cfg.reference_gain_db) * std::pow(distance, -cfg.pathloss_exponent);
        const double big = cfg.gain_convention == GainConvention::amplitude_squared ? g * g : g;
        return big / static_cast<double>(cfg.paths);
    }

    // Angles with joint pdf cos(theta)/(2 pi) on theta in [-pi/2, pi/2], phi in [-pi/2, pi/2]:
    // sin(theta) ~ U[-1, 1] and phi ~ U[-pi/2, pi/2].
    template <typename Rng>
    PathAngle sample_path_angle(Rng &rng)
    {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double s = unit(rng);
        const double phi = 0.5 * kPi * unit(rng);
        return {std::asin(s), phi};
    }

    // Draws a full scenario. All randomness comes from `seed`; geometry does not
    // consume random numbers, so the same seed yields the same paths for any frame size.
    inline ChannelScenario sample_scenario(const ScenarioConfig &cfg, std::uint64_t seed)
    {
        cfg.validate();
        ChannelScenario sc{ArrayGeometry(cfg.geometry), {}, seed};
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(cfg.distance_min, cfg.distance_max);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double noise = dbm_to_watts(cfg.noise_dbm);
        const auto L = static_cast<std::size_t>(cfg.paths);

        sc.users.reserve(static_cast<std::size_t>(cfg.users));
        for (int k = 0; k < cfg.users; ++k)
        {
            PathSet u;
            const double d = dist(rng);
            for (std::size_t l = 0; l < L; ++l)
                u.transmit.push_back(sample_path_angle(rng));
            for (std::size_t l = 0; l < L; ++l)
                u.receive.push_back(sample_path_angle(rng));
            const double sd = std::sqrt(0.5 * path_variance(cfg, d));
            u.response = CMatrix::Zero(cfg.paths, cfg.paths);
            for (int l = 0; l < cfg.paths; ++l)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                u.response(l, l) = Complex(sd * re, sd * im);
            }
            u.noise_power = noise;
            sc.users.push_back(std::move(u));
        }
        return sc;
    }
}

#endif
