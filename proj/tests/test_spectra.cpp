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
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotmac/errors.hpp"
#include "pilotmac/spectra.hpp"

using pmac::PowerSpectralDensity;

namespace
{
    // Triangle on [-ld, ld] sampled on a uniform grid with `points` nodes.
    PowerSpectralDensity triangle(double ld, int points)
    {
        std::vector<double> v(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
        {
            const double lam = -0.5 + static_cast<double>(i) / (points - 1);
            const double t = 1.0 - std::abs(lam) / ld;
            v[static_cast<std::size_t>(i)] = t > 1e-12 ? t : 0.0; // drop round-off dust at the band edges
        }
        return PowerSpectralDensity::tabulated(v);
    }
}

TEST(Spectra, BrickwallIsNormalized)
{
    const auto psd = PowerSpectralDensity::brickwall(0.1);
    EXPECT_DOUBLE_EQ(psd(0.0), 5.0);
    EXPECT_DOUBLE_EQ(psd(0.1), 5.0);
    EXPECT_DOUBLE_EQ(psd(0.2), 0.0);
    EXPECT_DOUBLE_EQ(psd.midpoint(0.1), 2.5);
    EXPECT_DOUBLE_EQ(psd.support_measure(), 0.2);
    EXPECT_NEAR(oracle::simpson([&](double l) { return psd(l); }, -0.1, 0.1, 200), 1.0, 1e-12);
}

TEST(Spectra, RejectsBadBandwidths)
{
    EXPECT_THROW(PowerSpectralDensity::brickwall(0.0), pmac::ConfigError);
    EXPECT_THROW(PowerSpectralDensity::brickwall(0.5), pmac::ConfigError);
    EXPECT_THROW(PowerSpectralDensity::brickwall(-0.1), pmac::ConfigError);
}

TEST(Spectra, BrickwallAutocorrelationMatchesSinc)
{
    const double ld = 1.0 / 16.0;
    const auto psd = PowerSpectralDensity::brickwall(ld);
    for (long m : {0L, 1L, 3L, 8L, 17L, -5L, 100L})
    {
        const auto r = pmac::autocorrelation(psd, m);
        EXPECT_NEAR(r.real(), oracle::brickwall_corr(ld, m), 1e-14) << "m=" << m;
        EXPECT_NEAR(r.imag(), 0.0, 1e-14);
    }
}

TEST(Spectra, TabulatedAutocorrelationMatchesQuadrature)
{
    const auto psd = triangle(0.2, 101);
    for (long m : {0L, 1L, 2L, 7L, 25L})
    {
        const auto ref = oracle::simpson(
            [&](double l) { return psd(l) * std::cos(2.0 * std::numbers::pi * m * l); }, -0.2, 0.2, 40000);
        EXPECT_NEAR(pmac::autocorrelation(psd, m).real(), ref, 1e-9) << "m=" << m;
    }
    EXPECT_NEAR(pmac::autocorrelation(psd, 0).real(), 1.0, 1e-12);
}

TEST(Spectra, TabulatedValidation)
{
    EXPECT_THROW(PowerSpectralDensity::tabulated({0, 1, 0}), pmac::ConfigError);          // too short
    EXPECT_THROW(PowerSpectralDensity::tabulated({0, 0, 1, 0, 1, 0, 0}), pmac::ConfigError); // hole in band
    EXPECT_THROW(PowerSpectralDensity::tabulated({1, 1, 1, 1, 1}), pmac::ConfigError);       // touches edges
    EXPECT_THROW(PowerSpectralDensity::tabulated({0, 1, 1, 1, 0, 0, 0}), pmac::ConfigError); // asymmetric
    EXPECT_THROW(PowerSpectralDensity::tabulated({0, -1, 1, -1, 0}), pmac::ConfigError);
    const auto psd = PowerSpectralDensity::tabulated({0, 0, 1, 2, 1, 0, 0});
    EXPECT_NEAR(psd.lambda_d(), 1.0 / 3.0, 1e-12);
}

TEST(Spectra, NyquistErrorMatchesClosedForm)
{
    for (double ld : {0.01, 1.0 / 16.0, 0.1})
    {
        const auto psd = PowerSpectralDensity::brickwall(ld);
        const int ls = pmac::lstar(ld);
        for (int L : {1, ls / 2 + 1, ls})
            for (double snr : {1.0, 10.0, 1e4, 1e8})
            {
                const double e = pmac::interp_error_nyquist(psd, L, snr);
                EXPECT_NEAR(e, oracle::brickwall_eps2(ld, L, snr), 1e-12);
                EXPECT_LE(snr * e, L * (1 + 1e-12));
            }
    }
}

TEST(Spectra, NyquistErrorTabulatedMatchesQuadrature)
{
    const auto psd = triangle(0.1, 201);
    const int L = 4;
    for (double snr : {1.0, 100.0, 1e5})
    {
        const double ref = 1.0 - oracle::simpson(
                                     [&](double l) {
                                         const double f = psd(l);
                                         return snr * f * f / (snr * f + L);
                                     },
                                     -0.1, 0.1, 20000);
        EXPECT_NEAR(pmac::interp_error_nyquist(psd, L, snr), ref, 1e-9);
    }
}

TEST(Spectra, NyquistViolationIsRejected)
{
    const auto psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
    EXPECT_THROW(pmac::interp_error_nyquist(psd, 9, 100.0), pmac::NyquistViolation);
}

TEST(Spectra, AsymptoticErrorIsPhaseFreeWithoutAliasing)
{
    const auto psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
    for (int L : {4, 8})
        for (int ell = 0; ell < L; ++ell)
            EXPECT_NEAR(pmac::interp_error_asymptotic(psd, L, 1e4, ell), pmac::interp_error_nyquist(psd, L, 1e4), 1e-10)
                << "L=" << L << " ell=" << ell;
}

TEST(Spectra, AsymptoticErrorShowsAliasingAboveLstar)
{
    const auto psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
    const double at_pilot = pmac::interp_error_asymptotic(psd, 12, 1e4, 0);
    const double between = pmac::interp_error_asymptotic(psd, 12, 1e4, 6);
    // At the pilot itself the estimate is still good; half-way it cannot be.
    EXPECT_LT(at_pilot, 1e-3);
    EXPECT_GT(between, 0.05);
    EXPECT_DOUBLE_EQ(pmac::interp_error_asymptotic(psd, 12, 0.0, 3), 1.0);
}

TEST(Spectra, FoldedSpectrumCarriesUnitPower)
{
    const auto psd = PowerSpectralDensity::brickwall(0.05);
    const double total = oracle::simpson([&](double l) { return pmac::folded_spectrum(psd, 4, 0, l).real(); }, -0.5, 0.5, 20000);
    EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(Spectra, LstarSnapsDecimalRatios)
{
    EXPECT_EQ(pmac::lstar(0.05), 10);
    EXPECT_EQ(pmac::lstar(0.007), 71);
    EXPECT_EQ(pmac::lstar(2e-4), 2500);
    EXPECT_EQ(pmac::lstar(1.0 / 16.0), 8);
    EXPECT_EQ(pmac::lstar(0.25), 2);
    EXPECT_EQ(pmac::lstar(0.3), 1);
    EXPECT_THROW(pmac::lstar(0.0), pmac::ConfigError);
    EXPECT_THROW(pmac::lstar(0.6), pmac::ConfigError);
    EXPECT_DOUBLE_EQ(pmac::doppler_lambda(100.0, 2000.0), 0.05);
}

TEST(Spectra, PsdFileRoundTrip)
{
    const auto psd = triangle(0.25, 41);
    std::stringstream buf;
    pmac::write_psd(buf, psd);
    const auto back = pmac::read_psd(buf);
    ASSERT_EQ(back.grid_values().size(), psd.grid_values().size());
    for (std::size_t i = 0; i < psd.grid_values().size(); ++i)
        EXPECT_NEAR(back.grid_values()[i], psd.grid_values()[i], 1e-14 * psd.grid_values()[i]);

    std::istringstream no_header("-0.5 0\n0 1\n0.5 0\n");
    EXPECT_THROW(pmac::read_psd(no_header), pmac::ConfigError);
}
