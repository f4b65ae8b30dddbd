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

#ifndef PILOTMAC_GMI_HPP
#define PILOTMAC_GMI_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pilotmac/config.hpp"
#include "pilotmac/estimator.hpp"
#include "pilotmac/parallel.hpp"

namespace pmac
{
    // The three error events of joint decoding: user 1 wrong, user 2 wrong, both wrong.
    enum class Bound
    {
        User1,
        User2,
        Sum
    };

    const char *to_string(Bound b);

    struct GmiOptions
    {
        std::size_t samples = 20000;
        std::uint64_t seed = 0;
        double max_std_error = 0.0; // > 0: throw NumericalError when exceeded
    };

    // Monte Carlo value in nats per channel use.
    struct McValue
    {
        double value = 0.0;
        double std_error = 0.0;
        std::size_t samples = 0;
        double clamp_rate = 0.0; // fraction of per-sample log-dets clamped at log_det_floor
    };

    inline constexpr double log_det_floor = -700.0;

    // Interpolation errors of the joint layout with one data block, which holds
    // every data phase once.
    ErrorStats joint_error_stats(const SystemConfig &config);

    // n_r (L - n_t1 - n_t2)/L + (SNR n_r / L) sum over data phases of sum_t mse.
    double f_snr(const SystemConfig &config, const ErrorStats &stats);

    // -1 / (n_r + n_r (n_t1 + n_t2) SNR eps2_T)
    double theta_star(const Antennas &antennas, double snr, double eps2_T);

    // Finite-window bound:
    // (1/L) sum_l E[log det(I + SNR Hh Hh^H / (n_r + n_r (n_t1+n_t2) SNR eps2_T))] - (L - n_t1 - n_t2)/L.
    // Hh is H_hat of the user (or the stacked pair for Bound::Sum) at data phase l.
    // Its entries are independent CN(0, 1 - mse(s, t, l)): every entry is a linear
    // function of the pilot outputs of its own link, which are independent across links.
    McValue gmi_lower_finite(const SystemConfig &config, const ErrorStats &stats, Bound bound,
                             const GmiOptions &opts = {}, const Exec &exec = {});

    // T -> infinity bound:
    // ((L - n_t1 - n_t2)/L) (E[log det(I + SNR Hb Hb^H / (n_r + n_r (n_t1+n_t2) SNR eps2))] - 1)
    // with Hb entries i.i.d. CN(0, 1 - eps2). Throws NyquistViolation when L > L*.
    McValue gmi_lower_asymptotic(const SystemConfig &config, double eps2, Bound bound,
                                 const GmiOptions &opts = {}, const Exec &exec = {});

    // Psi = E[log det Hb^H Hb] - 1 (n_r >= columns) or E[log det Hb Hb^H] - 1, Hb with
    // i.i.d. CN(0, variance) entries and the columns of the chosen bound.
    McValue psi(const Antennas &antennas, Bound bound, double variance, const GmiOptions &opts = {},
                const Exec &exec = {});

    // Loosened asymptotic bound from log det(I + A) >= log det A on the nonzero
    // eigenvalues: ((L - n_t1 - n_t2)/L) (min(n_r, cols) log(SNR / den) + Psi).
    McValue psi_bound(const SystemConfig &config, double eps2, Bound bound, const GmiOptions &opts = {},
                      const Exec &exec = {});

    // theta F + (1/L) sum_l E[log det(I - theta SNR Hh Hh^H)] for a given theta <= 0,
    // i.e. the GMI objective with the non-positive g term dropped.
    McValue gmi_objective(const SystemConfig &config, const ErrorStats &stats, Bound bound, double theta,
                          const GmiOptions &opts = {}, const Exec &exec = {});

    // Diagnostic only: Brent search of gmi_objective over [10 theta*, 0) on a fixed
    // sample set. Never a substitute for the theta* bound.
    struct ThetaRefinement
    {
        double theta = 0.0;
        McValue value;
        double theta_star = 0.0;
        McValue at_theta_star;
    };
    ThetaRefinement refine_theta(const SystemConfig &config, const ErrorStats &stats, Bound bound,
                                 const GmiOptions &opts = {}, const Exec &exec = {});

    // Least-squares slope of gmi against natural-log SNR; points are (linear SNR, gmi).
    double prelog_slope(std::span<const std::pair<double, double>> points);

    struct GmiPoint
    {
        double snr_db = 0.0;
        std::array<McValue, 3> finite;                    // User1, User2, Sum
        std::optional<std::array<McValue, 3>> asymptotic; // absent when L > L*
        std::optional<std::array<McValue, 3>> loosened;   // psi_bound, same condition
        double theta = 0.0;                               // theta* used by the finite bounds
        double eps2 = 1.0;
        double eps2_T = 1.0;
    };

    // Every bound at each SNR of the grid (dB). Sample streams are keyed by the
    // grid index so points are independent.
    std::vector<GmiPoint> gmi_curve(const SystemConfig &config, std::span<const double> snr_db,
                                    const GmiOptions &opts = {}, const Exec &exec = {});

    // CSV: snr_db, bound_user1, bound_user2, bound_sum, stderr_user1, stderr_user2,
    // stderr_sum, theta_used, eps2, eps2_T, then the asymptotic and loosened bounds
    // with their standard errors (empty when undefined).
    void write_gmi_csv(std::ostream &out, std::span<const GmiPoint> curve);
}

#endif
