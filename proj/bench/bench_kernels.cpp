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

// Serial reference path against the OpenMP kernels. The second benchmark argument
// selects the path: 0 serial, 1 OpenMP.

#include <benchmark/benchmark.h>

#include "pilotmac/channel.hpp"
#include "pilotmac/decoder.hpp"
#include "pilotmac/estimator.hpp"
#include "pilotmac/gmi.hpp"
#include "pilotmac/scheme.hpp"

using namespace pmac;

namespace
{
    Exec exec_of(const benchmark::State &state) { return state.range(1) ? Exec::omp() : Exec::serial(); }

    void set_label(benchmark::State &state) { state.SetLabel(state.range(1) ? "openmp" : "serial"); }

    void BM_GenFading(benchmark::State &state)
    {
        const PowerSpectralDensity psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
        const auto length = static_cast<std::size_t>(state.range(0));
        std::uint64_t seed = 0;
        for (auto _ : state)
            benchmark::DoNotOptimize(gen_fading(psd, 8, length, ++seed, exec_of(state)));
        state.SetItemsProcessed(state.iterations() * 8 * static_cast<std::int64_t>(length));
        set_label(state);
    }

    void BM_EmpiricalMse(benchmark::State &state)
    {
        const PowerSpectralDensity psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
        const Layout layout = build_joint_layout({1, 1, 2}, 8, 4, 48);
        const auto trials = static_cast<std::size_t>(state.range(0));
        for (auto _ : state)
            benchmark::DoNotOptimize(empirical_mse(psd, layout, 1e3, trials, 1, exec_of(state)));
        state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials));
        set_label(state);
    }

    void BM_Decode(benchmark::State &state)
    {
        const long n = 8;
        const double rate = std::log(static_cast<double>(state.range(0))) / n;
        const Codebook a(1, 1, rate, n, n, 1), b(2, 1, rate, n, n, 2);
        DataObservation obs;
        for (long k = 0; k < n; ++k)
        {
            obs.y.push_back(Eigen::VectorXcd::Random(2));
            obs.h1.push_back(Eigen::MatrixXcd::Random(2, 1));
            obs.h2.push_back(Eigen::MatrixXcd::Random(2, 1));
        }
        for (auto _ : state)
            benchmark::DoNotOptimize(decode(obs, a, b, 100.0, exec_of(state)));
        state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size() * b.size()));
        set_label(state);
    }

    void BM_GmiAsymptotic(benchmark::State &state)
    {
        SystemConfig c;
        c.antennas = {1, 1, 2};
        c.snr = 1e4;
        c.pilot_period = 8;
        c.window = 8;
        c.psd = PowerSpectralDensity::brickwall(1.0 / 16.0);
        GmiOptions o;
        o.samples = static_cast<std::size_t>(state.range(0));
        for (auto _ : state)
            benchmark::DoNotOptimize(gmi_lower_asymptotic(c, 1e-3, Bound::Sum, o, exec_of(state)));
        state.SetItemsProcessed(state.iterations() * state.range(0));
        set_label(state);
    }
}

BENCHMARK(BM_GenFading)->ArgsProduct({{1024, 8192}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalMse)->ArgsProduct({{200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decode)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GmiAsymptotic)->ArgsProduct({{20000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
