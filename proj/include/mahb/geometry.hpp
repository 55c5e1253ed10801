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

#ifndef MAHB_GEOMETRY_HPP
#define MAHB_GEOMETRY_HPP

#include "common.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace mahb
{
    // Closed axis-aligned rectangle.
    struct Region
    {
        double x_min = 0.0;
        double x_max = 0.0;
        double y_min = 0.0;
        double y_max = 0.0;

        bool contains(const Point &p) const
        {
            return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
        }
        Point center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
        double width() const { return x_max - x_min; }
        double height() const { return y_max - y_min; }
    };

    // Centers c_{m,n} of all sub-arrays, stored in row-major sub-array order.
    struct SubArrayCenters
    {
        std::vector<Point> points;

        std::size_t size() const { return points.size(); }
        Point &operator[](std::size_t s) { return points[s]; }
        const Point &operator[](std::size_t s) const { return points[s]; }
        bool operator==(const SubArrayCenters &) const = default;
    };

    struct GeometryParams
    {
        int n_rf_h = 2;            // sub-arrays along x
        int n_rf_v = 2;            // sub-arrays along y
        int n_h = 2;               // antennas per sub-array along x
        int n_v = 2;               // antennas per sub-array along y
        double wavelength = 0.01;  // [m]
        double frame_size = 0.02;  // frame edge D [m]
        std::vector<Point> offsets; // relative antenna positions; empty selects a half-wavelength grid
    };

    // Half-wavelength antenna grid centred on the sub-array reference point.
    // Antenna (i,j) sits at index i*n_h + j, j runs along +x and i along -y.
    inline std::vector<Point> half_wavelength_offsets(int n_h, int n_v, double wavelength)
    {
        std::vector<Point> out;
        out.reserve(static_cast<std::size_t>(n_h * n_v));
        const double step = 0.5 * wavelength;
        for (int i = 0; i < n_v; ++i)
            for (int j = 0; j < n_h; ++j)
                out.emplace_back((j - 0.5 * (n_h - 1)) * step, (0.5 * (n_v - 1) - i) * step);
        return out;
    }

    // Sub-array grid, antenna offsets, frames and movable regions.
    //
    // Frames are D x D squares tiled with pitch D (adjacent, interiors disjoint).
    // Sub-array (row, col) has index row*n_rf_h + col; columns run along +x, rows along -y.
    // The movable region of each center is its frame shrunk by the largest offset per axis,
    // so any feasible center keeps every antenna inside the frame.
    class ArrayGeometry
    {
    public:
        ArrayGeometry() : ArrayGeometry(GeometryParams{}) {}

        explicit ArrayGeometry(GeometryParams p) : params_(std::move(p))
        {
            if (params_.n_rf_h < 1 || params_.n_rf_v < 1 || params_.n_h < 1 || params_.n_v < 1)
                throw ConfigError("ArrayGeometry: all array dimensions must be >= 1");
            if (!(params_.wavelength > 0.0) || !std::isfinite(params_.wavelength))
                throw ConfigError("ArrayGeometry: wavelength must be positive");
            if (!(params_.frame_size > 0.0) || !std::isfinite(params_.frame_size))
                throw ConfigError("ArrayGeometry: frame size must be positive");
            if (params_.offsets.empty())
                params_.offsets = half_wavelength_offsets(params_.n_h, params_.n_v, params_.wavelength);
            if (params_.offsets.size() != static_cast<std::size_t>(params_.n_h * params_.n_v))
                throw ConfigError("ArrayGeometry: offset count must equal n_h * n_v");

            double ext_x = 0.0, ext_y = 0.0;
            for (const auto &d : params_.offsets)
            {
                ext_x = std::max(ext_x, std::abs(d.x()));
                ext_y = std::max(ext_y, std::abs(d.y()));
            }
            const double half = 0.5 * params_.frame_size;
            if (ext_x > half || ext_y > half)
                throw ConfigError("ArrayGeometry: frame is smaller than the sub-array aperture");

            const double D = params_.frame_size;
            for (int row = 0; row < params_.n_rf_v; ++row)
                for (int col = 0; col < params_.n_rf_h; ++col)
                {
                    const Point o((col - 0.5 * (params_.n_rf_h - 1)) * D, (0.5 * (params_.n_rf_v - 1) - row) * D);
                    origins_.push_back(o);
                    regions_.push_back({o.x() - (half - ext_x), o.x() + (half - ext_x),
                                        o.y() - (half - ext_y), o.y() + (half - ext_y)});
                }
        }

        int n_rf_h() const { return params_.n_rf_h; }
        int n_rf_v() const { return params_.n_rf_v; }
        int n_h() const { return params_.n_h; }
        int n_v() const { return params_.n_v; }
        double wavelength() const { return params_.wavelength; }
        double frame_size() const { return params_.frame_size; }
        const std::vector<Point> &offsets() const { return params_.offsets; }
        const GeometryParams &params() const { return params_; }

        int num_subarrays() const { return params_.n_rf_h * params_.n_rf_v; }
        int antennas_per_subarray() const { return params_.n_h * params_.n_v; }
        int num_antennas() const { return num_subarrays() * antennas_per_subarray(); }
        int subarray_index(int row, int col) const { return row * params_.n_rf_h + col; }

        const Point &frame_origin(std::size_t s) const { return origins_.at(s); }
        const Region &region(std::size_t s) const { return regions_.at(s); }
        Region frame(std::size_t s) const
        {
            const Point &o = origins_.at(s);
            const double half = 0.5 * params_.frame_size;
            return {o.x() - half, o.x() + half, o.y() - half, o.y() + half};
        }

        SubArrayCenters frame_centers() const { return {origins_}; }

        bool feasible(const SubArrayCenters &c) const
        {
            if (c.size() != regions_.size())
                return false;
            for (std::size_t s = 0; s < c.size(); ++s)
                if (!regions_[s].contains(c[s]))
                    return false;
            return true;
        }

        // Same array with a different frame edge D.
        ArrayGeometry with_frame_size(double frame_size) const
        {
            GeometryParams p = params_;
            p.frame_size = frame_size;
            return ArrayGeometry(std::move(p));
        }

    private:
        GeometryParams params_;
        std::vector<Point> origins_;
        std::vector<Region> regions_;
    };
}

#endif
