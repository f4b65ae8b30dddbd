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

#ifndef PILOTMAC_ESTIMATOR_HPP
#define PILOTMAC_ESTIMATOR_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "pilotmac/parallel.hpp"
#include "pilotmac/scheme.hpp"
#include "pilotmac/spectra.hpp"
#include "pilotmac/stats.hpp"

namespace pmac
{
    // Windowed LMMSE interpolator for H_{user,k}(r, t). The same weights apply to
    // every receive antenna r.
    struct InterpolatorCoeffs
    {
        int user = 1;
        int antenna = 1;
        int target_slot = 0;
        std::vector<int> offsets;                  // pilot slot minus target slot
        std::vector<std::complex<double>> weights; // estimate = sum weights[i] * Y_{target + offsets[i]}(r)
        double mse = 1.0;                          // analytic 1 - c^H C^-1 c

        int pilot_slot(std::size_t i) const { return target_slot + offsets[i]; }
    };

    // Solves the normal equations over the pilots of (user, antenna) inside
    // [k - TL, k + TL], k = data_slot. Pilots of other users and antennas are not
    // part of the regression.
    InterpolatorCoeffs lmmse_coefficients(const PowerSpectralDensity &psd, const Layout &layout, double snr,
                                          int user, int antenna, int data_slot);

    // Applies the interpolator to the outputs of one receive antenna at the pilot
    // slots, given in the order of coeffs.offsets.
    std::complex<double> estimate_fading(std::span<const std::complex<double>> y_at_pilots,
                                         const InterpolatorCoeffs &coeffs);

    // Interpolators for every (user, antenna, codeword position) of a layout.
    // Positions whose pilot pattern coincides share one solved system.
    class EstimatorBank
    {
    public:
        EstimatorBank(const PowerSpectralDensity &psd, const Layout &layout, double snr);

        const Layout &layout() const { return *layout_; }
        double snr() const { return snr_; }

        // Interpolator for codeword position `position` of `user`, antenna `antenna`.
        // target_slot is set to the data slot of that position.
        InterpolatorCoeffs at(int user, int antenna, std::size_t position) const;
        const InterpolatorCoeffs &pattern(int user, int antenna, std::size_t position) const;

    private:
        const Layout *layout_;
        double snr_;
        std::map<long, std::complex<double>> lags_;
        std::vector<InterpolatorCoeffs> patterns_;
        // index_[user-1][antenna-1][position] -> patterns_ id
        std::array<std::vector<std::vector<std::size_t>>, 2> index_;
    };

    struct PhaseError
    {
        int user = 1;
        int antenna = 1;
        int data_phase = 1; // 1-based rank of the slot phase among the user's data phases
        int slot_phase = 0; // k mod L
        int pilot_offset = 0; // (k - pilot slot) mod L, the phase seen by the interpolator
        double analytic = 1.0;   // finite-window MSE
        double asymptotic = 1.0; // window -> infinity limit at this offset
    };

    struct ErrorStats
    {
        std::vector<PhaseError> phases;
        double eps2_T = 1.0; // max of the finite-window MSE over users, antennas, phases
        double eps2 = 1.0;   // alias-free limit; max of the asymptotic profile otherwise
        bool alias_free = true;

        // Sum over antennas of the analytic MSE of `user` at `data_phase`.
        double antenna_sum(int user, int data_phase) const;
        int data_phases(int user) const;
        double max_mse(int user) const;
    };

    ErrorStats analytic_error_stats(const PowerSpectralDensity &psd, const Layout &layout, double snr);

    struct EmpiricalPhase
    {
        PhaseError reference;
        MeanEstimate mse;                 // E|H - H_hat|^2 over trials and receive antennas
        std::vector<MeanEstimate> per_rx; // same, per receive antenna
        MeanEstimate estimate_power;      // E|H_hat|^2
        MeanEstimate cross_re;            // Re E[H_hat conj(H - H_hat)]
        MeanEstimate cross_im;            // Im E[H_hat conj(H - H_hat)]
    };

    struct EmpiricalProfile
    {
        std::vector<EmpiricalPhase> phases;
        double eps2_T = 1.0; // analytic
        std::size_t trials = 0;

        double max_empirical() const;
    };

    // Monte Carlo interpolation error: each trial synthesizes the fading of every
    // link over the whole layout, forms the pilot outputs, and interpolates at the
    // first data slot of each phase. Needs at least 100 trials.
    EmpiricalProfile empirical_mse(const PowerSpectralDensity &psd, const Layout &layout, double snr,
                                   std::size_t trials, std::uint64_t seed, const Exec &exec = {});

    // CSV with columns phase_ell, analytic_mse, empirical_mse, stderr, then user,
    // antenna, pilot_offset, asymptotic_mse, eps2_T. phase_ell is the slot phase k mod L.
    void write_mse_csv(std::ostream &out, const EmpiricalProfile &profile);
}

#endif
