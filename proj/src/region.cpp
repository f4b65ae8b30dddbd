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

#include "pilotmac/region.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "pilotmac/errors.hpp"

namespace pmac
{
    namespace
    {
        void check_counts(int n_t1, int n_t2, int n_r)
        {
            if (n_t1 < 1 || n_t2 < 1 || n_r < 1)
                throw ConfigError("antenna counts must be >= 1");
        }

        void check_lstar(int l_star)
        {
            if (l_star < 1)
                throw ConfigError("L* must be >= 1");
        }

        Rational max0(const Rational &r) { return r < 0 ? Rational(0) : r; }

        // a / b with a / 0 = infinity for a > 0
        ExtRational ext_div(std::int64_t a, std::int64_t b)
        {
            if (b == 0)
                return std::nullopt;
            return Rational(a, b);
        }

        Rational cross(const Point &o, const Point &a, const Point &b)
        {
            return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        }

        // Andrew's monotone chain; collinear points are dropped.
        std::vector<Point> convex_hull(std::vector<Point> pts)
        {
            std::sort(pts.begin(), pts.end(), [](const Point &a, const Point &b) {
                return a.x < b.x || (a.x == b.x && a.y < b.y);
            });
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            if (pts.size() < 3)
                return pts;
            std::vector<Point> h(2 * pts.size());
            std::size_t k = 0;
            for (const Point &p : pts)
            {
                while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0)
                    --k;
                h[k++] = p;
            }
            for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;)
            {
                while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0)
                    --k;
                h[k++] = pts[i];
            }
            h.resize(k - 1);
            return h;
        }
    }

    std::string to_string(const Rational &r)
    {
        std::ostringstream s;
        s << r.numerator();
        if (r.denominator() != 1)
            s << '/' << r.denominator();
        return s.str();
    }

    std::string to_string(const ExtRational &r) { return r ? to_string(*r) : "inf"; }

    PreLogRegion PreLogRegion::scaled(const Rational &factor) const
    {
        PreLogRegion out = *this;
        out.a1 *= factor;
        out.a2 *= factor;
        out.c *= factor;
        for (BetaCorner &b : out.hull)
        {
            b.corner.x *= factor;
            b.corner.y *= factor;
        }
        return out;
    }

    PreLogRegion joint_region(int n_t1, int n_t2, int n_r, int l_star)
    {
        check_counts(n_t1, n_t2, n_r);
        check_lstar(l_star);
        const int sum_t = n_t1 + n_t2;
        PreLogRegion r;
        if (l_star < sum_t)
        {
            r.empty = true;
            return r;
        }
        const Rational factor = 1 - Rational(sum_t, l_star);
        r.a1 = std::min(n_r, n_t1) * factor;
        r.a2 = std::min(n_r, n_t2) * factor;
        r.c = std::min(n_r, sum_t) * factor;
        return r;
    }

    PreLogRegion tdma_region(int n_t1, int n_t2, int n_r, int l_star, std::vector<Rational> beta_grid)
    {
        check_counts(n_t1, n_t2, n_r);
        check_lstar(l_star);
        if (beta_grid.empty())
            beta_grid = {Rational(0), Rational(1)};
        PreLogRegion r;
        r.kind = PreLogRegion::Kind::BetaHull;
        r.a1 = max0(std::min(n_r, n_t1) * (1 - Rational(n_t1, l_star)));
        r.a2 = max0(std::min(n_r, n_t2) * (1 - Rational(n_t2, l_star)));
        r.c = std::max(r.a1, r.a2);
        for (const Rational &beta : beta_grid)
        {
            if (beta < 0 || beta > 1)
                throw ConfigError("beta grid must lie in [0, 1]");
            r.hull.push_back({beta, {beta * r.a1, (1 - beta) * r.a2}});
        }
        return r;
    }

    Rational coherent_tdma_sum(int n_t1, int n_t2, int n_r, const Rational &beta)
    {
        check_counts(n_t1, n_t2, n_r);
        if (beta < 0 || beta > 1)
            throw ConfigError("beta must lie in [0, 1]");
        return beta * std::min(n_r, n_t1) + (1 - beta) * std::min(n_r, n_t2);
    }

    PreLogRegion coherent_tdma_region(int n_t1, int n_t2, int n_r)
    {
        check_counts(n_t1, n_t2, n_r);
        PreLogRegion r;
        r.kind = PreLogRegion::Kind::BetaHull;
        r.a1 = std::min(n_r, n_t1);
        r.a2 = std::min(n_r, n_t2);
        r.c = std::max(r.a1, r.a2);
        r.hull.push_back({Rational(0), {Rational(0), r.a2}});
        r.hull.push_back({Rational(1), {r.a1, Rational(0)}});
        return r;
    }

    PreLogRegion genie_region(int n_t1, int n_t2, int n_r)
    {
        check_counts(n_t1, n_t2, n_r);
        PreLogRegion r;
        r.a1 = std::min(n_r, n_t1);
        r.a2 = std::min(n_r, n_t2);
        r.c = std::min(n_r, n_t1 + n_t2);
        return r;
    }

    Thresholds corollary_thresholds(int n_t1, int n_t2, int n_r)
    {
        check_counts(n_t1, n_t2, n_r);
        const std::int64_t sum_t = n_t1 + n_t2;
        const std::int64_t m = std::min<std::int64_t>(n_r, sum_t);
        Thresholds t;
        t.joint_superior_if_lstar_gt = ext_div(m * sum_t, m - std::min(n_r, std::max(n_t1, n_t2)));
        const std::int64_t sq = std::min({std::int64_t{n_t1} * n_r, std::int64_t{n_t1} * n_t1,
                                          std::int64_t{n_t2} * n_r, std::int64_t{n_t2} * n_t2});
        t.tdma_superior_if_lstar_lt = ext_div(m * sum_t - sq, m - std::min({n_r, n_t1, n_t2}));
        return t;
    }

    const char *to_string(Classification c)
    {
        switch (c)
        {
        case Classification::JointBeatsAllTDMA:
            return "joint_beats_all_tdma";
        case Classification::BestTDMABeatsJoint:
            return "best_tdma_beats_joint";
        case Classification::IntermediateZone:
            return "intermediate_zone";
        }
        return "unknown";
    }

    Comparison compare_schemes(int n_t1, int n_t2, int n_r, int l_star)
    {
        check_counts(n_t1, n_t2, n_r);
        check_lstar(l_star);
        Comparison c;
        c.n_t1 = n_t1;
        c.n_t2 = n_t2;
        c.n_r = n_r;
        c.l_star = l_star;
        c.joint_sum = std::min(n_r, n_t1 + n_t2) * (1 - Rational(n_t1 + n_t2, l_star));
        // Both TDMA sums are linear in beta, so the maximum sits at an endpoint.
        c.tdma_sum = std::max(std::min(n_r, n_t1) * (1 - Rational(n_t1, l_star)),
                              std::min(n_r, n_t2) * (1 - Rational(n_t2, l_star)));
        c.coherent_sum = std::max(coherent_tdma_sum(n_t1, n_t2, n_r, 1), coherent_tdma_sum(n_t1, n_t2, n_r, 0));
        if (c.joint_sum > c.coherent_sum)
            c.cls = Classification::JointBeatsAllTDMA;
        else if (c.joint_sum < c.tdma_sum)
            c.cls = Classification::BestTDMABeatsJoint;
        else
            c.cls = Classification::IntermediateZone;
        c.thresholds = corollary_thresholds(n_t1, n_t2, n_r);
        return c;
    }

    nlohmann::json to_json(const Comparison &c)
    {
        return {
            {"config", {{"n_t1", c.n_t1}, {"n_t2", c.n_t2}, {"n_r", c.n_r}, {"l_star", c.l_star}}},
            {"joint_sum", to_string(c.joint_sum)},
            {"joint_region_empty", c.l_star < c.n_t1 + c.n_t2},
            {"tdma_sum", to_string(c.tdma_sum)},
            {"coherent_tdma_sum", to_string(c.coherent_sum)},
            {"class", to_string(c.cls)},
            {"thresholds",
             {{"joint_superior_if_lstar_gt", to_string(c.thresholds.joint_superior_if_lstar_gt)},
              {"tdma_superior_if_lstar_lt", to_string(c.thresholds.tdma_superior_if_lstar_lt)}}},
        };
    }

    SisoCheck siso_capacity_check(const PowerSpectralDensity &psd)
    {
        SisoCheck s;
        s.l_star = lstar(psd.lambda_d());
        s.tdma_sum = 1 - Rational(1, s.l_star);
        s.tdma_value = boost::rational_cast<double>(s.tdma_sum);
        s.capacity_prelog = 1.0 - psd.support_measure();
        s.equal = std::abs(s.tdma_value - s.capacity_prelog) <= 1e-12;
        return s;
    }

    std::vector<Point> region_corners(const PreLogRegion &region)
    {
        if (region.kind == PreLogRegion::Kind::BetaHull)
        {
            std::vector<Point> pts{{Rational(0), Rational(0)}};
            for (const BetaCorner &b : region.hull)
            {
                pts.push_back(b.corner);
                pts.push_back({b.corner.x, Rational(0)});
                pts.push_back({Rational(0), b.corner.y});
            }
            return convex_hull(std::move(pts)); // starts at the origin: smallest (x, y)
        }

        const Rational &a1 = region.a1, &a2 = region.a2, &c = region.c;
        const Rational x1 = std::min(a1, c);
        const Rational y2 = std::min(a2, c);
        const std::vector<Point> raw{
            {Rational(0), Rational(0)},
            {x1, Rational(0)},
            {x1, std::min(a2, c - x1)},
            {std::min(a1, c - y2), y2},
            {Rational(0), y2},
        };
        std::vector<Point> out;
        for (const Point &p : raw)
            if (out.empty() || !(out.back() == p))
                out.push_back(p);
        while (out.size() > 1 && out.back() == out.front())
            out.pop_back();
        return out;
    }

    void write_region_csv(std::ostream &out, const std::vector<Point> &corners)
    {
        out << "x,y\n";
        for (const Point &p : corners)
            out << to_string(p.x) << ',' << to_string(p.y) << '\n';
        if (!corners.empty())
            out << to_string(corners.front().x) << ',' << to_string(corners.front().y) << '\n';
    }
}
