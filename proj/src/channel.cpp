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

#include "pilotmac/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "pilotmac/errors.hpp"
#include "pilotmac/random.hpp"

namespace pmac
{
    namespace
    {
        constexpr std::size_t min_block = 8192;

        std::size_t next_pow2(std::size_t v)
        {
            std::size_t p = 1;
            while (p < v)
                p <<= 1;
            return p;
        }

        template <class T>
        void put_le(std::ostream &out, T value)
        {
            static_assert(std::is_trivially_copyable_v<T>);
            char bytes[sizeof(T)];
            std::memcpy(bytes, &value, sizeof(T));
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(bytes, bytes + sizeof(T));
            out.write(bytes, sizeof(T));
        }

        template <class T>
        T get_le(std::istream &in)
        {
            char bytes[sizeof(T)];
            if (!in.read(bytes, sizeof(T)))
                throw ConfigError("truncated fading dump");
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(bytes, bytes + sizeof(T));
            T value;
            std::memcpy(&value, bytes, sizeof(T));
            return value;
        }
    }

    FadingGenerator::FadingGenerator(const PowerSpectralDensity &psd, std::size_t length, std::size_t oversize)
        : length_(length)
    {
        if (length < 1)
            throw ConfigError("fading length must be >= 1");
        if (oversize < 8)
            throw ConfigError("circulant embedding needs an oversize factor of at least 8");
        const std::size_t n = next_pow2(std::max(oversize * length, min_block));

        std::vector<double> eig(n);
        for (std::size_t j = 0; j < n; ++j)
            eig[j] = std::max(0.0, psd.midpoint(static_cast<double>(j) / static_cast<double>(n)));
        double power = 0.0;
        for (double e : eig)
            power += e;
        if (!(power > 0.0))
            throw NumericalError("circulant embedding has no positive eigenvalue; the band is narrower than the grid");
        const double scale = static_cast<double>(n) / power; // mean eigenvalue 1

        sqrt_weights_.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            sqrt_weights_[j] = std::sqrt(eig[j] * scale * static_cast<double>(n));
    }

    std::vector<double> FadingGenerator::eigenvalues() const
    {
        const double n = static_cast<double>(sqrt_weights_.size());
        std::vector<double> eig(sqrt_weights_.size());
        for (std::size_t j = 0; j < eig.size(); ++j)
            eig[j] = sqrt_weights_[j] * sqrt_weights_[j] / n;
        return eig;
    }

    void FadingGenerator::generate(std::uint64_t key, std::span<std::complex<double>> out) const
    {
        if (out.size() != length_)
            throw ConfigError("fading output buffer has the wrong length");
        thread_local Eigen::FFT<double> fft;
        thread_local std::vector<std::complex<double>> spectrum, block;

        const std::size_t n = sqrt_weights_.size();
        spectrum.resize(n);
        ComplexGaussian gauss(key);
        for (std::size_t j = 0; j < n; ++j)
            spectrum[j] = sqrt_weights_[j] * gauss();
        // The inverse transform carries the 1/N factor and the +i sign convention.
        fft.inv(block, spectrum);
        std::copy_n(block.begin(), length_, out.begin());
    }

    FadingRealization gen_fading(const PowerSpectralDensity &psd, std::size_t num_links, std::size_t length,
                                 std::uint64_t seed, const Exec &exec)
    {
        const FadingGenerator generator(psd, length);
        FadingRealization fading;
        fading.num_links = num_links;
        fading.length = length;
        fading.seed = seed;
        fading.samples.resize(num_links * length);
        for_each_index(exec, num_links, [&](std::size_t l)
                       { generator.generate(derive_key(seed, {l, 0}),
                                            std::span<std::complex<double>>(fading.samples).subspan(l * length, length)); });
        return fading;
    }

    Eigen::VectorXcd apply_channel(const Eigen::VectorXcd &x1, const Eigen::VectorXcd &x2,
                                   const Eigen::MatrixXcd &h1, const Eigen::MatrixXcd &h2,
                                   double snr, const Eigen::VectorXcd &noise)
    {
        if (h1.cols() != x1.size() || h2.cols() != x2.size() || h1.rows() != noise.size() ||
            h2.rows() != noise.size())
            throw ConfigError("apply_channel: dimension mismatch");
        if (!(snr >= 0.0))
            throw ConfigError("snr must be non-negative");
        const double amp = std::sqrt(snr);
        return amp * (h1 * x1) + amp * (h2 * x2) + noise;
    }

    void write_fading_dump(std::ostream &out, const FadingRealization &fading)
    {
        out.write("FADE1", 5);
        put_le<std::uint64_t>(out, fading.num_links);
        put_le<std::uint64_t>(out, fading.length);
        put_le<std::uint64_t>(out, fading.seed);
        for (const auto &z : fading.samples)
        {
            put_le<float>(out, static_cast<float>(z.real()));
            put_le<float>(out, static_cast<float>(z.imag()));
        }
    }

    FadingRealization read_fading_dump(std::istream &in)
    {
        char magic[5];
        if (!in.read(magic, 5) || std::memcmp(magic, "FADE1", 5) != 0)
            throw ConfigError("not a FADE1 fading dump");
        FadingRealization fading;
        fading.num_links = get_le<std::uint64_t>(in);
        fading.length = get_le<std::uint64_t>(in);
        fading.seed = get_le<std::uint64_t>(in);
        fading.samples.resize(fading.num_links * fading.length);
        for (auto &z : fading.samples)
        {
            const float re = get_le<float>(in);
            const float im = get_le<float>(in);
            z = {re, im};
        }
        return fading;
    }
}
