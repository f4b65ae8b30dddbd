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

#ifndef PILOTMAC_RANDOM_HPP
#define PILOTMAC_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace pmac
{
    namespace detail
    {
        constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

        constexpr std::uint64_t mix64(std::uint64_t z)
        {
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }
    }

    // Folds a master seed and a list of stream identifiers (link id, trial id, ...)
    // into one generator key. Distinct id tuples give unrelated streams.
    constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
    {
        std::uint64_t key = detail::mix64(seed + detail::golden_gamma);
        for (std::uint64_t id : ids)
            key = detail::mix64(key ^ detail::mix64(id + detail::golden_gamma));
        return key;
    }

    // Counter-based generator: the i-th output is a bijective mix of (key, i), so any
    // stream position is addressable and streams with distinct keys never share state.
    // Satisfies UniformRandomBitGenerator.
    class CounterRng
    {
    public:
        using result_type = std::uint64_t;

        explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

        result_type operator()()
        {
            ++counter_;
            return detail::mix64(key_ + counter_ * detail::golden_gamma);
        }

        std::uint64_t counter() const { return counter_; }

    private:
        std::uint64_t key_;
        std::uint64_t counter_;
    };

    // Circularly-symmetric complex Gaussian source, independent real and imaginary
    // parts of variance 1/2 each.
    class ComplexGaussian
    {
    public:
        explicit ComplexGaussian(std::uint64_t key) : rng_(key), normal_(0.0, std::sqrt(0.5)) {}

        std::complex<double> operator()()
        {
            const double re = normal_(rng_);
            const double im = normal_(rng_);
            return {re, im};
        }

        std::complex<double> operator()(double variance) { return std::sqrt(variance) * (*this)(); }

    private:
        CounterRng rng_;
        std::normal_distribution<double> normal_;
    };
}

#endif
