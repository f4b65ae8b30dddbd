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

#ifndef PILOTMAC_CHANNEL_HPP
#define PILOTMAC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pilotmac/config.hpp"
#include "pilotmac/parallel.hpp"
#include "pilotmac/spectra.hpp"

namespace pmac
{
    // Synthesizes stationary complex Gaussian processes with spectrum f_H by
    // circulant embedding. The embedding block has N >= max(8 * length, 8192) points
    // (a power of two); its eigenvalues are the spectral samples f_H(j/N), i.e. the
    // circulant built from the N-periodized autocorrelation, so no power leaks
    // outside the band. Eigenvalues are clipped at zero and renormalized to unit
    // total power. The first `length` samples of each block are returned.
    class FadingGenerator
    {
    public:
        FadingGenerator(const PowerSpectralDensity &psd, std::size_t length, std::size_t oversize = 8);

        std::size_t length() const { return length_; }
        std::size_t block_size() const { return sqrt_weights_.size(); }

        // Circulant eigenvalues, normalized so that their mean is 1.
        std::vector<double> eigenvalues() const;

        // One process realization driven by the counter-based stream `key`.
        void generate(std::uint64_t key, std::span<std::complex<double>> out) const;

    private:
        std::size_t length_;
        std::vector<double> sqrt_weights_;
    };

    // Independent fading processes, link-major: sample(link, k).
    struct FadingRealization
    {
        std::size_t num_links = 0;
        std::size_t length = 0;
        std::uint64_t seed = 0;
        std::vector<std::complex<double>> samples;

        std::span<const std::complex<double>> link(std::size_t l) const
        {
            return std::span<const std::complex<double>>(samples).subspan(l * length, length);
        }
        std::complex<double> sample(std::size_t l, std::size_t k) const { return samples[l * length + k]; }
    };

    // Link ordering of a MAC realization: user 1 links (r, t) at r * n_t1 + t, then
    // user 2 links at n_r * n_t1 + r * n_t2 + t (r, t 0-based).
    inline std::size_t link_index(const Antennas &antennas, int user, int r, int t)
    {
        const std::size_t base = user == 1 ? 0 : static_cast<std::size_t>(antennas.n_r * antennas.n_t1);
        return base + static_cast<std::size_t>(r * antennas.n_t(user) + t);
    }

    inline std::size_t link_count(const Antennas &antennas)
    {
        return static_cast<std::size_t>(antennas.n_r * antennas.total_tx());
    }

    // H_{user,slot} (n_r x n_t) read from a MAC realization.
    inline Eigen::MatrixXcd fading_matrix(const FadingRealization &fading, const Antennas &antennas, int user, std::size_t slot)
    {
        Eigen::MatrixXcd h(antennas.n_r, antennas.n_t(user));
        for (int r = 0; r < antennas.n_r; ++r)
            for (int t = 0; t < antennas.n_t(user); ++t)
                h(r, t) = fading.sample(link_index(antennas, user, r, t), slot);
        return h;
    }

    // Link l is driven by the stream derive_key(seed, {l, 0}).
    FadingRealization gen_fading(const PowerSpectralDensity &psd, std::size_t num_links, std::size_t length,
                                 std::uint64_t seed, const Exec &exec = {});

    // Y = sqrt(SNR) H1 x1 + sqrt(SNR) H2 x2 + Z.
    Eigen::VectorXcd apply_channel(const Eigen::VectorXcd &x1, const Eigen::VectorXcd &x2,
                                   const Eigen::MatrixXcd &h1, const Eigen::MatrixXcd &h2,
                                   double snr, const Eigen::VectorXcd &noise);

    // Binary dump: magic "FADE1", u64 num_links, u64 length, u64 seed, then
    // link-major little-endian complex64 (float re, float im) samples.
    void write_fading_dump(std::ostream &out, const FadingRealization &fading);
    FadingRealization read_fading_dump(std::istream &in);
}

#endif
