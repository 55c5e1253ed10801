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

#ifndef MAHB_RATE_HPP
#define MAHB_RATE_HPP

#include "beamformer.hpp"
#include "channel.hpp"

namespace mahb
{
    inline double sum_rate(const SubArrayCenters &centers, const HybridBeamformer &bf, const ChannelScenario &scenario)
    {
        const CMatrix H = channel_matrix(centers, scenario);
        return sum_rate(link_gains(H, bf.precoder(scenario.geometry)), scenario.noise_powers());
    }
}

#endif
