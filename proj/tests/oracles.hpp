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

// Independent numerical references shared by the unit tests. Nothing here calls
// into the library.

#ifndef PILOTMAC_TESTS_ORACLES_HPP
#define PILOTMAC_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle
{
    // Composite Simpson rule with n (even) intervals.
    template <class Fn>
    auto simpson(Fn &&fn, double a, double b, int n)
    {
        if (n % 2)
            ++n;
        const double h = (b - a) / n;
        auto s = fn(a) + fn(b);
        for (int i = 1; i < n; ++i)
            s += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
        return s * (h / 3.0);
    }

    // Brickwall (flat on [-ld, ld]) interpolation error for alias-free pilots.
    inline double brickwall_eps2(double ld, double period, double snr)
    {
        return 2.0 * ld * period / (snr + 2.0 * ld * period);
    }

    // sin(2 pi ld m) / (2 pi ld m)
    inline double brickwall_corr(double ld, long m)
    {
        if (m == 0)
            return 1.0;
        const double x = 2.0 * std::numbers::pi * ld * static_cast<double>(m);
        return std::sin(x) / x;
    }

    inline constexpr double euler_gamma = 0.57721566490153286061;
}

#endif
