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

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotmac/errors.hpp"
#include "pilotmac/gmi.hpp"

using namespace pmac;

namespace
{
    SystemConfig simo_config(double snr, int window = 4)
    {
        SystemConfig c;
        c.antennas = {1, 1, 2};
        c.snr = snr;
        c.pilot_period = 8;
        c.window = window;
        c.psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
        return c;
    }

    GmiOptions opts(std::size_t samples, std::uint64_t seed = 1)
    {
        GmiOptions o;
        o.samples = samples;
        o.seed = seed;
        return o;
    }
}

TEST(Gmi, ThetaStar)
{
    EXPECT_DOUBLE_EQ(theta_star({1, 1, 2}, 100.0, 0.0), -0.5);
    EXPECT_DOUBLE_EQ(theta_star({1, 1, 2}, 100.0, 0.01), -1.0 / 6.0);
    EXPECT_LT(theta_star({1, 1, 2}, 100.0, 0.01), theta_star({1, 1, 2}, 100.0, 0.02));
    EXPECT_THROW(theta_star({1, 1, 2}, 100.0, 1.5), ConfigError);
}

TEST(Gmi, FsnrWithPerfectEstimates)
{
    const SystemConfig c = simo_config(100.0);
    ErrorStats s;
    for (int u = 1; u <= 2; ++u)
        for (int p = 1; p <= 6; ++p)
            s.phases.push_back({u, 1, p, p + 1, p + 1, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(f_snr(c, s), 2.0 * 6.0 / 8.0);
}

TEST(Gmi, FsnrWithFlatErrors)
{
    // Every phase at the closed-form limit: F = n_r (L-2)/L + (L-2)/L * SNR n_r * 2 eps2
    const SystemConfig c = simo_config(1e3);
    const double e2 = oracle::brickwall_eps2(1.0 / 16.0, 8, 1e3);
    ErrorStats s;
    for (int u = 1; u <= 2; ++u)
        for (int p = 1; p <= 6; ++p)
            s.phases.push_back({u, 1, p, p + 1, p + 1, e2, e2});
    EXPECT_NEAR(f_snr(c, s), 2.0 * 0.75 + 0.75 * 1e3 * 2.0 * 2.0 * e2, 1e-12);
}

TEST(Gmi, FiniteBoundAtZeroSnr)
{
    const SystemConfig c = simo_config(0.0);
    const ErrorStats s = joint_error_stats(c);
    const McValue v = gmi_lower_finite(c, s, Bound::User1, opts(100));
    EXPECT_DOUBLE_EQ(v.value, -0.75);
    EXPECT_DOUBLE_EQ(v.std_error, 0.0);
}

TEST(Gmi, AsymptoticBoundWithUselessEstimates)
{
    const SystemConfig c = simo_config(1e3);
    EXPECT_DOUBLE_EQ(gmi_lower_asymptotic(c, 1.0, Bound::Sum, opts(100)).value, -0.75);
}

TEST(Gmi, ScalarAsymptoticMatchesExponentialIntegral)
{
    // n_r = n_t1 = 1: E[log(1 + a |h|^2)] = exp(1/a) E1(1/a) for |h|^2 ~ Exp(1)
    SystemConfig c = simo_config(100.0);
    c.antennas = {1, 1, 1};
    const double eps2 = interp_error_nyquist(c.psd, 8, 100.0);
    const double a = 100.0 * (1.0 - eps2) / (1.0 + 2.0 * 100.0 * eps2);
    const double exact = 0.75 * (std::exp(1.0 / a) * boost::math::expint(1, 1.0 / a) - 1.0);
    const McValue v = gmi_lower_asymptotic(c, eps2, Bound::User1, opts(40000, 4));
    EXPECT_NEAR(v.value, exact, 4.0 * v.std_error);
}

TEST(Gmi, PsiScalarLogMoment)
{
    for (double var : {0.1, 0.5, 1.0})
    {
        const McValue p = psi({1, 1, 1}, Bound::User1, var, opts(40000, 8));
        EXPECT_NEAR(p.value, std::log(var) - oracle::euler_gamma - 1.0, 4.0 * p.std_error) << "v=" << var;
        EXPECT_EQ(p.clamp_rate, 0.0);
    }
    EXPECT_THROW(psi({1, 1, 1}, Bound::User1, 0.0, opts(10)), ConfigError);
}

TEST(Gmi, PsiDeterminantScaling)
{
    // Same draws scaled: Psi(v) - Psi(1) = min(n_r, cols) log v exactly per sample.
    const Antennas ant{2, 1, 3};
    const McValue a = psi(ant, Bound::User1, 0.3, opts(2000, 5));
    const McValue b = psi(ant, Bound::User1, 1.0, opts(2000, 5));
    EXPECT_NEAR(a.value - b.value, 2.0 * std::log(0.3), 1e-9);
    // budget doubling keeps the estimate stable
    const McValue c = psi(ant, Bound::User1, 1.0, opts(4000, 6));
    EXPECT_NEAR(b.value, c.value, 4.0 * std::hypot(b.std_error, c.std_error));
}

TEST(Gmi, PsiComplexWishartLogDeterminant)
{
    // E[log det W] for W = G^H G, G n x m with CN(0,1) entries: sum_{i<m} psi(n - i)
    const Antennas ant{2, 1, 3};
    const double exact = boost::math::digamma(3.0) + boost::math::digamma(2.0) - 1.0;
    const McValue p = psi(ant, Bound::User1, 1.0, opts(40000, 12));
    EXPECT_NEAR(p.value, exact, 4.0 * p.std_error);
}

TEST(Gmi, SumBoundDominatesUserBounds)
{
    const SystemConfig c = simo_config(1e3);
    const ErrorStats s = joint_error_stats(c);
    const McValue u1 = gmi_lower_finite(c, s, Bound::User1, opts(5000));
    const McValue u2 = gmi_lower_finite(c, s, Bound::User2, opts(5000));
    const McValue sum = gmi_lower_finite(c, s, Bound::Sum, opts(5000));
    EXPECT_GE(sum.value, u1.value - 2.0 * std::hypot(sum.std_error, u1.std_error));
    EXPECT_GE(sum.value, u2.value - 2.0 * std::hypot(sum.std_error, u2.std_error));
    EXPECT_NEAR(u1.value, u2.value, 4.0 * std::hypot(u1.std_error, u2.std_error));
}

TEST(Gmi, BoundsIncreaseWithSnr)
{
    double last[3] = {-1e9, -1e9, -1e9};
    double last_se[3] = {0, 0, 0};
    for (double db : {10.0, 20.0, 30.0, 40.0, 50.0})
    {
        const SystemConfig c = simo_config(std::pow(10.0, db / 10.0), 8);
        const ErrorStats s = joint_error_stats(c);
        for (int b = 0; b < 3; ++b)
        {
            const McValue v = gmi_lower_asymptotic(c, s.eps2, static_cast<Bound>(b), opts(4000));
            EXPECT_GE(v.value, last[b] - 2.0 * std::hypot(v.std_error, last_se[b])) << db << " dB";
            last[b] = v.value;
            last_se[b] = v.std_error;
        }
    }
}

TEST(Gmi, FiniteWindowBoundStaysBelowTheLimit)
{
    // Longer windows shrink eps2_T, so the bound climbs toward the T -> infinity value.
    double prev = -1e9;
    for (int T : {1, 2, 4, 8})
    {
        const SystemConfig c = simo_config(1e3, T);
        const ErrorStats s = joint_error_stats(c);
        const McValue v = gmi_lower_finite(c, s, Bound::Sum, opts(4000));
        EXPECT_GT(v.value, prev);
        prev = v.value;
    }
    const SystemConfig c = simo_config(1e3, 8);
    const McValue lim = gmi_lower_asymptotic(c, joint_error_stats(c).eps2, Bound::Sum, opts(4000));
    EXPECT_LT(prev, lim.value);
}

TEST(Gmi, RefinedThetaIsNeverWorse)
{
    const SystemConfig c = simo_config(1e2, 2);
    const ErrorStats s = joint_error_stats(c);
    const ThetaRefinement r = refine_theta(c, s, Bound::User1, opts(500));
    EXPECT_GE(r.value.value, r.at_theta_star.value);
    EXPECT_LE(r.theta, 0.0);
    // the explicit bound is below the objective at theta* (theta* F >= -(L - 2)/L)
    EXPECT_LE(gmi_lower_finite(c, s, Bound::User1, opts(500)).value, r.at_theta_star.value + 1e-12);
}

TEST(Gmi, AsymptoticNeedsAliasFreePilots)
{
    SystemConfig c = simo_config(100.0);
    c.pilot_period = 9;
    EXPECT_THROW(gmi_lower_asymptotic(c, 0.01, Bound::User1, opts(10)), NyquistViolation);
}

TEST(Gmi, StandardErrorBudget)
{
    const SystemConfig c = simo_config(1e3);
    GmiOptions o = opts(10);
    o.max_std_error = 1e-6;
    EXPECT_THROW(gmi_lower_asymptotic(c, 0.01, Bound::User1, o), NumericalError);
}

TEST(Gmi, PrelogSlopeRegression)
{
    std::vector<std::pair<double, double>> line, flat;
    for (double snr : {10.0, 100.0, 1000.0})
    {
        line.emplace_back(snr, 2.0 * std::log(snr) + 1.0);
        flat.emplace_back(snr, 0.4);
    }
    EXPECT_NEAR(prelog_slope(line), 2.0, 1e-12);
    EXPECT_NEAR(prelog_slope(flat), 0.0, 1e-12);
    EXPECT_THROW(prelog_slope(std::vector<std::pair<double, double>>{{1.0, 1.0}}), ConfigError);
    EXPECT_THROW(prelog_slope(std::vector<std::pair<double, double>>{{2.0, 1.0}, {2.0, 3.0}}), ConfigError);
}

TEST(Gmi, AsymptoticUserSlope)
{
    // (n_t1, n_t2, n_r) = (2, 1, 1), L = 8: slope min(1, 2)(1 - 3/8)
    std::vector<std::pair<double, double>> pts;
    for (double db : {30.0, 40.0, 50.0})
    {
        SystemConfig c = simo_config(std::pow(10.0, db / 10.0));
        c.antennas = {2, 1, 1};
        pts.emplace_back(c.snr, gmi_lower_asymptotic(c, interp_error_nyquist(c.psd, 8, c.snr), Bound::User1, opts(10000)).value);
    }
    EXPECT_NEAR(prelog_slope(pts), 0.625, 0.0625);
}

TEST(Gmi, CurveCsvColumns)
{
    const SystemConfig c = simo_config(1.0, 2);
    const std::vector<double> grid{10.0, 20.0};
    const auto curve = gmi_curve(c, grid, opts(200));
    ASSERT_EQ(curve.size(), 2u);
    ASSERT_TRUE(curve[0].asymptotic.has_value());
    std::ostringstream out;
    write_gmi_csv(out, curve);
    const std::string head = out.str().substr(0, out.str().find('\n'));
    EXPECT_EQ(head.rfind("snr_db,bound_user1,bound_user2,bound_sum,stderr_user1,stderr_user2,stderr_sum,theta_used,eps2,eps2_T", 0), 0u);
    EXPECT_THROW(gmi_curve(c, std::vector<double>{}, opts(10)), ConfigError);
}
