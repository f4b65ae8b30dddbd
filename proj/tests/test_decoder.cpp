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

#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "pilotmac/decoder.hpp"
#include "pilotmac/errors.hpp"

using namespace pmac;

namespace
{
    // Random observation for a (n_t1, n_t2, n_r) channel over `len` data slots.
    DataObservation random_observation(std::mt19937_64 &rng, int n_t1, int n_t2, int n_r, long len)
    {
        std::normal_distribution<double> g(0.0, 1.0);
        const auto cg = [&] { return std::complex<double>(g(rng), g(rng)); };
        DataObservation obs;
        for (long k = 0; k < len; ++k)
        {
            Eigen::VectorXcd y(n_r);
            Eigen::MatrixXcd h1(n_r, n_t1), h2(n_r, n_t2);
            for (int r = 0; r < n_r; ++r)
            {
                y(r) = cg();
                for (int t = 0; t < n_t1; ++t)
                    h1(r, t) = cg();
                for (int t = 0; t < n_t2; ++t)
                    h2(r, t) = cg();
            }
            obs.y.push_back(y);
            obs.h1.push_back(h1);
            obs.h2.push_back(h2);
        }
        return obs;
    }

    // Plain double loop over metric().
    std::pair<std::size_t, std::size_t> brute_force(const DataObservation &obs, const Codebook &a, const Codebook &b, double snr)
    {
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::size_t, std::size_t> arg{0, 0};
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
            {
                const double d = metric(obs, a, i, b, j, snr);
                if (d < best)
                {
                    best = d;
                    arg = {i, j};
                }
            }
        return arg;
    }
}

TEST(Decoder, MessageCountUsesNaturalLogRates)
{
    EXPECT_EQ(message_count(0.0, 10), 1u);
    EXPECT_EQ(message_count(std::log(4.0) / 3.0, 3), 4u);
    EXPECT_EQ(message_count(0.1, 10), 3u); // ceil(e)
    EXPECT_THROW(message_count(2.0, 10), BudgetError);
    EXPECT_THROW(message_count(-0.1, 10), ConfigError);
}

TEST(Decoder, CodebooksAreReproducibleAndUserSpecific)
{
    const Codebook a(1, 2, 0.2, 10, 10, 42), b(1, 2, 0.2, 10, 10, 42), c(2, 2, 0.2, 10, 10, 42);
    EXPECT_EQ(a.size(), 8u);
    EXPECT_EQ(a.symbol(3, 4), b.symbol(3, 4));
    EXPECT_NE(a.symbol(3, 4), c.symbol(3, 4));
}

TEST(Decoder, MetricHandExample)
{
    // y = 3, H1 = H2 = 1, x1 = x2 = 1, SNR = 1 -> (3 - 2)^2
    DataObservation obs;
    obs.y.push_back(Eigen::VectorXcd::Constant(1, 3.0));
    obs.h1.push_back(Eigen::MatrixXcd::Constant(1, 1, 1.0));
    obs.h2.push_back(Eigen::MatrixXcd::Constant(1, 1, 1.0));
    // One-message codebooks overwritten through a fixed seed are not settable, so
    // build a tiny check through the single-user form as well.
    const Codebook cb1(1, 1, 0.0, 1, 1, 0), cb2(2, 1, 0.0, 1, 1, 0);
    const std::complex<double> x1 = cb1.symbol(0, 0)(0), x2 = cb2.symbol(0, 0)(0);
    EXPECT_NEAR(metric(obs, cb1, 0, cb2, 0, 1.0), std::norm(3.0 - x1 - x2), 1e-12);
    EXPECT_NEAR(metric_single(obs, cb1, 0, 1.0), std::norm(3.0 - x1), 1e-12);

    // the hand number itself: choose y so that y - x1 - x2 = 1
    obs.y[0](0) = 1.0 + x1 + x2;
    EXPECT_NEAR(metric(obs, cb1, 0, cb2, 0, 1.0), 1.0, 1e-12);
}

TEST(Decoder, MetricIsZeroForTheTruePairWithoutNoise)
{
    std::mt19937_64 rng(1);
    DataObservation obs = random_observation(rng, 2, 1, 3, 5);
    const Codebook cb1(1, 2, 0.3, 5, 5, 7), cb2(2, 1, 0.3, 5, 5, 7);
    const double snr = 10.0;
    for (std::size_t k = 0; k < 5; ++k)
        obs.y[k] = std::sqrt(snr) * (obs.h1[k] * cb1.symbol(2, static_cast<long>(k)) + obs.h2[k] * cb2.symbol(1, static_cast<long>(k)));
    EXPECT_NEAR(metric(obs, cb1, 2, cb2, 1, snr), 0.0, 1e-20);
    const Decision d = decode(obs, cb1, cb2, snr);
    EXPECT_EQ(d.m1, 2u);
    EXPECT_EQ(d.m2, 1u);
    EXPECT_EQ(d.event, ErrorEvent::Both);
}

TEST(Decoder, MetricIgnoresSlotOrder)
{
    std::mt19937_64 rng(2);
    DataObservation obs = random_observation(rng, 1, 1, 2, 4);
    const Codebook cb1(1, 1, 0.2, 4, 4, 3), cb2(2, 1, 0.2, 4, 4, 3);
    const double before = metric(obs, cb1, 1, cb2, 0, 2.0);
    // reversing the observation pairs with reversed codewords is the same sum;
    // equivalently, per-slot terms commute:
    double parts = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
    {
        const auto e = obs.y[k] - std::sqrt(2.0) * obs.h1[k] * cb1.symbol(1, static_cast<long>(k)) -
                       std::sqrt(2.0) * obs.h2[k] * cb2.symbol(0, static_cast<long>(k));
        parts += e.squaredNorm();
    }
    EXPECT_NEAR(before, parts, 1e-12);
}

TEST(Decoder, MatchesBruteForce)
{
    std::mt19937_64 rng(77);
    for (int inst = 0; inst < 40; ++inst)
    {
        const int n_t1 = 1 + inst % 2, n_t2 = 1 + (inst / 2) % 2, n_r = 1 + inst % 3;
        const long len = 1 + inst % 4;
        const DataObservation obs = random_observation(rng, n_t1, n_t2, n_r, len);
        const Codebook cb1(1, n_t1, 1.0, len, len, inst), cb2(2, n_t2, 0.7, len, len, inst + 1000);
        const auto ref = brute_force(obs, cb1, cb2, 3.0);
        const Decision d = decode(obs, cb1, cb2, 3.0);
        EXPECT_EQ(d.m1, ref.first);
        EXPECT_EQ(d.m2, ref.second);
        EXPECT_EQ(d.value, metric(obs, cb1, d.m1, cb2, d.m2, 3.0));
    }
}

TEST(Decoder, SerialAndParallelAreIdentical)
{
    std::mt19937_64 rng(5);
    const DataObservation obs = random_observation(rng, 2, 2, 2, 3);
    const Codebook cb1(1, 2, 1.5, 3, 3, 1), cb2(2, 2, 1.5, 3, 3, 2);
    const Decision a = decode(obs, cb1, cb2, 5.0, Exec::serial());
    const Decision b = decode(obs, cb1, cb2, 5.0, Exec::omp(4));
    EXPECT_EQ(a.m1, b.m1);
    EXPECT_EQ(a.m2, b.m2);
    EXPECT_EQ(a.value, b.value);
}

TEST(Decoder, TiesResolveToTheSmallestPair)
{
    // Zero estimates make every pair tie at ||y||^2.
    std::mt19937_64 rng(9);
    DataObservation obs = random_observation(rng, 1, 1, 1, 3);
    for (auto &h : obs.h1)
        h.setZero();
    for (auto &h : obs.h2)
        h.setZero();
    const Codebook cb1(1, 1, 0.5, 3, 3, 1), cb2(2, 1, 0.5, 3, 3, 2);
    const Decision d = decode(obs, cb1, cb2, 1.0, Exec::omp(3));
    EXPECT_EQ(d.m1, 0u);
    EXPECT_EQ(d.m2, 0u);
    EXPECT_EQ(d.event, ErrorEvent::None);
}

TEST(Decoder, CommonScalingKeepsTheDecision)
{
    std::mt19937_64 rng(10);
    DataObservation obs = random_observation(rng, 1, 2, 2, 3);
    const Codebook cb1(1, 1, 0.8, 3, 3, 4), cb2(2, 2, 0.8, 3, 3, 5);
    const Decision a = decode(obs, cb1, cb2, 2.0);
    const std::complex<double> c(0.3, -1.7);
    for (std::size_t k = 0; k < obs.y.size(); ++k)
    {
        obs.y[k] *= c;
        obs.h1[k] *= c;
        obs.h2[k] *= c;
    }
    const Decision b = decode(obs, cb1, cb2, 2.0);
    EXPECT_EQ(a.m1, b.m1);
    EXPECT_EQ(a.m2, b.m2);
    EXPECT_NEAR(b.value, std::norm(c) * a.value, 1e-9 * b.value);
}

TEST(Decoder, ClassifiesAgainstTheFirstPair)
{
    EXPECT_EQ(classify(0, 0), ErrorEvent::None);
    EXPECT_EQ(classify(2, 0), ErrorEvent::User1Only);
    EXPECT_EQ(classify(0, 1), ErrorEvent::User2Only);
    EXPECT_EQ(classify(1, 1), ErrorEvent::Both);
}

TEST(Decoder, BudgetGuard)
{
    std::mt19937_64 rng(3);
    const DataObservation obs = random_observation(rng, 1, 1, 1, 20);
    const Codebook cb1(1, 1, std::log(1100.0) / 20, 20, 20, 1), cb2(2, 1, std::log(1100.0) / 20, 20, 20, 2);
    EXPECT_THROW(decode(obs, cb1, cb2, 1.0), BudgetError);
}

namespace
{
    ExperimentSettings base_settings()
    {
        ExperimentSettings s;
        s.system.antennas = {1, 1, 2};
        s.system.psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
        s.system.pilot_period = 8;
        s.system.window = 2;
        s.system.snr = 1e4;
        s.n = 12;
        s.trials = 60;
        s.seed = 31;
        return s;
    }
}

TEST(Experiment, RateZeroNeverErrs)
{
    ExperimentSettings s = base_settings();
    s.rates = {0.0, 0.0};
    const ErrorReport r = run_mc_experiment(s);
    EXPECT_EQ(r.messages[0], 1u);
    EXPECT_EQ(r.any.errors, 0u);
    EXPECT_EQ(r.events[0], s.trials);
}

TEST(Experiment, LowRateAtHighSnrIsReliable)
{
    ExperimentSettings s = base_settings();
    s.rates = {0.4, 0.4}; // well below the 40 dB bounds (about 3 nats)
    const ErrorReport r = run_mc_experiment(s);
    EXPECT_LT(r.any.p, 0.1);
}

TEST(Experiment, RatesAboveTheSumBoundFail)
{
    ExperimentSettings s = base_settings();
    s.system.snr = 1.0; // 0 dB: GMI well below a nat
    s.n = 6;
    s.rates = {1.0, 1.0}; // 404 x 404 messages over six symbols
    const ErrorReport r = run_mc_experiment(s);
    EXPECT_GT(r.any.p, 0.5);
}

TEST(Experiment, GenieCsiDoesNotHurt)
{
    ExperimentSettings s = base_settings();
    s.system.snr = 10.0;
    s.rates = {0.4, 0.4};
    s.trials = 150;
    const ErrorReport est = run_mc_experiment(s);
    s.genie_csi = true;
    const ErrorReport genie = run_mc_experiment(s);
    const double sd = std::sqrt(est.any.p * (1 - est.any.p) / s.trials + genie.any.p * (1 - genie.any.p) / s.trials);
    EXPECT_LE(genie.any.p, est.any.p + 3.0 * sd + 1e-12);
}

TEST(Experiment, TdmaRunsEachUserOnItsSegment)
{
    ExperimentSettings s = base_settings();
    s.scheme = {SchemeKind::Tdma, 0.5};
    s.n = 42;
    s.rates = {0.05, 0.05};
    const ErrorReport r = run_mc_experiment(s);
    EXPECT_EQ(r.scheme, SchemeKind::Tdma);
    EXPECT_GT(r.beta, 0.0);
    EXPECT_LT(r.beta, 1.0);
    EXPECT_LT(r.any.p, 0.1);
    const auto j = to_json(r);
    EXPECT_EQ(j["scheme"], "tdma");
    EXPECT_TRUE(j.contains("ci_95"));
}

TEST(Experiment, SerialAndParallelAreIdentical)
{
    ExperimentSettings s = base_settings();
    s.system.snr = 3.0;
    s.rates = {0.3, 0.3};
    s.trials = 40;
    const ErrorReport a = run_mc_experiment(s, Exec::serial());
    const ErrorReport b = run_mc_experiment(s, Exec::omp(4));
    EXPECT_EQ(a.events, b.events);
}
