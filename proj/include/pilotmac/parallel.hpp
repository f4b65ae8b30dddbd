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

#ifndef PILOTMAC_PARALLEL_HPP
#define PILOTMAC_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include <omp.h>

namespace pmac
{
    // Execution policy for the Monte Carlo and enumeration kernels.
    // Every kernel has a serial reference path; the OpenMP path writes per-index
    // results into preallocated storage and reduces them in fixed index order, so
    // both paths return bit-identical results for any worker count.
    struct Exec
    {
        enum class Mode
        {
            Serial,
            OpenMP
        };

        Mode mode = Mode::OpenMP;
        int workers = 0; // 0: OpenMP runtime default

        static Exec serial() { return {Mode::Serial, 1}; }
        static Exec omp(int workers = 0) { return {Mode::OpenMP, workers}; }

        bool parallel() const { return mode == Mode::OpenMP; }
        int threads() const { return workers > 0 ? workers : omp_get_max_threads(); }
    };

    // Calls fn(i) for every i in [0, n). fn must only write state owned by index i.
    // The first exception thrown by any iteration is rethrown after the loop.
    template <class Fn>
    void for_each_index(const Exec &exec, std::size_t n, Fn &&fn)
    {
        if (!exec.parallel() || n < 2)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::exception_ptr error;
        std::mutex error_lock;
        const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(exec.threads())
        for (long long i = 0; i < count; ++i)
        {
            try
            {
                fn(static_cast<std::size_t>(i));
            }
            catch (...)
            {
                std::lock_guard<std::mutex> guard(error_lock);
                if (!error)
                    error = std::current_exception();
            }
        }
        if (error)
            std::rethrow_exception(error);
    }

    // Pairwise (cascade) summation in fixed order.
    inline double pairwise_sum(std::span<const double> v)
    {
        if (v.size() <= 8)
        {
            double s = 0.0;
            for (double x : v)
                s += x;
            return s;
        }
        const std::size_t half = v.size() / 2;
        return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
    }
}

#endif
