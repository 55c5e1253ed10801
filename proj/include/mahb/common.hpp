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

#ifndef MAHB_COMMON_HPP
#define MAHB_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mahb
{
    using Complex = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using Point = Eigen::Vector2d;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // Invalid parameters, dimensions or files. Maps to CLI exit code 1.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // A solver or experiment could not complete. Maps to CLI exit code 2.
    class RuntimeFailure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

    // Wraps an angle into [0, 2pi).
    inline double wrap_phase(double psi)
    {
        double w = std::fmod(psi, kTwoPi);
        if (w < 0.0)
            w += kTwoPi;
        if (w >= kTwoPi)
            w = 0.0;
        return w;
    }

    inline Complex unit_phasor(double psi) { return {std::cos(psi), std::sin(psi)}; }
}

#endif
