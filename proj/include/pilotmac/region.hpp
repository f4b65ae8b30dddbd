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

#ifndef PILOTMAC_REGION_HPP
#define PILOTMAC_REGION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include "pilotmac/spectra.hpp"

namespace pmac
{
    using Rational = boost::rational<std::int64_t>;

    // A threshold that may be +infinity (a/0 with a > 0); nullopt encodes infinity.
    using ExtRational = std::optional<Rational>;

    std::string to_string(const Rational &r);
    std::string to_string(const ExtRational &r); // "inf" for infinity

    struct Point
    {
        Rational x;
        Rational y;
        bool operator==(const Point &) const = default;
    };

    struct BetaCorner
    {
        Rational beta;
        Point corner; // (beta a1, (1 - beta) a2)
    };

    // Closed pre-log region. CapSum: {p1 <= a1, p2 <= a2, p1 + p2 <= c, p >= 0}.
    // BetaHull: convex hull of the rectangles [0, x] x [0, y] over the listed corners.
    struct PreLogRegion
    {
        enum class Kind
        {
            CapSum,
            BetaHull
        };

        Kind kind = Kind::CapSum;
        Rational a1{0};
        Rational a2{0};
        Rational c{0};
        std::vector<BetaCorner> hull;
        bool empty = false; // joint scheme with L* < n_t1 + n_t2: no room for data

        PreLogRegion scaled(const Rational &factor) const;
        bool same_caps(const PreLogRegion &other) const { return a1 == other.a1 && a2 == other.a2 && c == other.c; }
    };

    // Caps min(n_r, n_ts)(1 - (n_t1+n_t2)/L*) and min(n_r, n_t1+n_t2)(1 - (n_t1+n_t2)/L*).
    // For L* < n_t1 + n_t2 the region is flagged empty and all caps are zero.
    PreLogRegion joint_region(int n_t1, int n_t2, int n_r, int l_star);

    // Convex hull over beta of (beta min(n_r,n_t1)(1 - n_t1/L*), (1-beta) min(n_r,n_t2)(1 - n_t2/L*)).
    // Negative single-user caps (L* < n_ts) are clamped to zero. An empty grid means {0, 1}.
    PreLogRegion tdma_region(int n_t1, int n_t2, int n_r, int l_star, std::vector<Rational> beta_grid = {});

    // beta min(n_r, n_t1) + (1 - beta) min(n_r, n_t2)
    Rational coherent_tdma_sum(int n_t1, int n_t2, int n_r, const Rational &beta);

    // Coherent TDMA as a region: the segment between (min(n_r,n_t1), 0) and (0, min(n_r,n_t2)).
    PreLogRegion coherent_tdma_region(int n_t1, int n_t2, int n_r);

    // Perfect-CSI MAC caps min(n_r, n_t1), min(n_r, n_t2), min(n_r, n_t1 + n_t2).
    PreLogRegion genie_region(int n_t1, int n_t2, int n_r);

    struct Thresholds
    {
        ExtRational joint_superior_if_lstar_gt; // joint beats every TDMA scheme above this
        ExtRational tdma_superior_if_lstar_lt;  // best TDMA beats joint below this
    };

    Thresholds corollary_thresholds(int n_t1, int n_t2, int n_r);

    enum class Classification
    {
        JointBeatsAllTDMA,
        BestTDMABeatsJoint,
        IntermediateZone
    };

    const char *to_string(Classification c);

    // Sum pre-logs are the raw formula values (not clamped at zero), so the
    // comparison stays strict below L* = n_t1 + n_t2 as well.
    struct Comparison
    {
        int n_t1 = 1, n_t2 = 1, n_r = 1, l_star = 1;
        Rational joint_sum;    // min(n_r, n_t1+n_t2)(1 - (n_t1+n_t2)/L*)
        Rational tdma_sum;     // max over beta of the pilot-based TDMA sum
        Rational coherent_sum; // max over beta of the coherent TDMA sum
        Classification cls = Classification::IntermediateZone;
        Thresholds thresholds;
    };

    Comparison compare_schemes(int n_t1, int n_t2, int n_r, int l_star);
    nlohmann::json to_json(const Comparison &c);

    // SISO check: TDMA sum pre-log 1 - 1/L* against the capacity pre-log
    // mu{lambda : f_H(lambda) = 0} = 1 - support measure.
    struct SisoCheck
    {
        int l_star = 1;
        Rational tdma_sum;
        double tdma_value = 0.0;
        double capacity_prelog = 0.0;
        bool equal = false; // |difference| <= 1e-12
    };

    SisoCheck siso_capacity_check(const PowerSpectralDensity &psd);

    // Counter-clockwise vertices starting at the origin, exact.
    std::vector<Point> region_corners(const PreLogRegion &region);

    // CSV "x,y" with exact fractions, closed loop (first vertex repeated at the end).
    void write_region_csv(std::ostream &out, const std::vector<Point> &corners);
}

#endif
