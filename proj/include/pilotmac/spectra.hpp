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

#ifndef PILOTMAC_SPECTRA_HPP
#define PILOTMAC_SPECTRA_HPP

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace pmac
{
    enum class PsdShape
    {
        Brickwall,
        Tabulated
    };

    // Power spectral density f_H of a unit-variance fading process on [-1/2, 1/2].
    //
    // f_H is zero for |lambda| > lambda_d and strictly positive inside the band.
    // Brickwall: f_H = 1/(2 lambda_d) on [-lambda_d, lambda_d].
    // Tabulated: linear interpolation between values on a uniform grid that covers
    // [-1/2, 1/2] including both endpoints; normalized to unit power on construction.
    class PowerSpectralDensity
    {
    public:
        static PowerSpectralDensity brickwall(double lambda_d);
        static PowerSpectralDensity tabulated(std::vector<double> grid_values);

        PsdShape shape() const { return shape_; }
        double lambda_d() const { return lambda_d_; }

        // f_H(lambda) for lambda in [-1/2, 1/2]; zero outside the band. The brickwall
        // band is closed.
        double operator()(double lambda) const;

        // 1-periodic extension of f_H.
        double periodic(double lambda) const;

        // Average of the left and right limits of the periodic extension. This is
        // the value a Fourier series converges to, used for spectral sampling.
        double midpoint(double lambda) const;

        // Points in [-lambda_d, lambda_d] where f_H is not smooth, sorted, including
        // the band edges.
        std::vector<double> breakpoints() const;

        // Lebesgue measure of {lambda : f_H(lambda) > 0}.
        double support_measure() const;

        // Tabulated shape only: normalized node values and grid step.
        std::span<const double> grid_values() const { return values_; }
        double grid_step() const { return step_; }

    private:
        PowerSpectralDensity() = default;

        PsdShape shape_ = PsdShape::Brickwall;
        double lambda_d_ = 0.0;
        std::vector<double> values_;
        double step_ = 0.0;
        std::size_t first_ = 0; // first zero node left of the band
        std::size_t last_ = 0;  // first zero node right of the band
    };

    // Plain-text grid format: a "# psd v1" header, then "lambda value" per line on a
    // uniform grid over [-1/2, 1/2].
    PowerSpectralDensity read_psd(std::istream &in);
    PowerSpectralDensity load_psd_file(const std::filesystem::path &path);
    void write_psd(std::ostream &out, const PowerSpectralDensity &psd);

    // E[H_{k+m} conj(H_k)] = integral of exp(i 2 pi m lambda) f_H(lambda).
    std::complex<double> autocorrelation(const PowerSpectralDensity &psd, long m);

    // Spectrum of the L-fold undersampled process seen from phase ell:
    // (1/L) sum_{j<L} fbar((lambda - j)/L) exp(i 2 pi ell (lambda - j)/L).
    std::complex<double> folded_spectrum(const PowerSpectralDensity &psd, int period, int ell, double lambda);

    // Limit (T -> infinity) of the LMMSE interpolation error at offset ell from the
    // pilot slot, for pilots every `period` slots. Defined for aliased periods too.
    double interp_error_asymptotic(const PowerSpectralDensity &psd, int period, double snr, int ell);

    // Phase-independent interpolation error for alias-free periods.
    // Throws NyquistViolation when period > lstar(lambda_d).
    double interp_error_nyquist(const PowerSpectralDensity &psd, int period, double snr);

    // Largest integer L with L <= 1/(2 lambda_d). A ratio within 1e-9 (relative) of an
    // integer counts as that integer, so decimal inputs such as 0.05 land on 10.
    int lstar(double lambda_d);

    // Normalized Doppler bandwidth f_m / W_c.
    double doppler_lambda(double max_doppler_hz, double coherence_bandwidth_hz);
}

#endif
