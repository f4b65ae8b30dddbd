// SPDX-License-Identifier: Apache-2.0
//
// pilotmac - pilot-assisted nearest-neighbour decoding over fading MACs
// Copyright (C) 2026 The pilotmac authors
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

#ifndef PILOTMAC_STATS_HPP
#define PILOTMAC_STATS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "pilotmac/parallel.hpp"

namespace pmac
{
    // Sample mean with its standard error.
    struct MeanEstimate
    {
        double mean = 0.0;
        double std_error = 0.0;
        std::size_t count = 0;
    };

    inline MeanEstimate mean_estimate(std::span<const double> samples)
    {
        MeanEstimate est;
        est.count = samples.size();
        if (samples.empty())
            return est;
        const double n = static_cast<double>(samples.size());
        est.mean = pairwise_sum(samples) / n;
        if (samples.size() < 2)
            return est;
        double ss = 0.0;
        for (double x : samples)
            ss += (x - est.mean) * (x - est.mean);
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
        return est;
    }

    // Wilson score interval for a binomial proportion.
    inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054)
    {
        if (trials == 0)
            return {0.0, 1.0};
        const double n = static_cast<double>(trials);
        const double p = static_cast<double>(successes) / n;
        const double z2 = z * z;
        const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
        return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
    }
}

#endif
