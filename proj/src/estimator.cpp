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

#include "pilotmac/estimator.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "pilotmac/channel.hpp"
#include "pilotmac/errors.hpp"
#include "pilotmac/random.hpp"

namespace pmac
{
    namespace
    {
        // Offsets (relative to k) of the pilots of (user, antenna) within [k - TL, k + TL].
        std::vector<int> window_offsets(const Layout &layout, int user, int antenna, int k)
        {
            const long reach = static_cast<long>(layout.window) * layout.period;
            const long lo = std::max<long>(0, k - reach);
            const long hi = std::min<long>(static_cast<long>(layout.length()) - 1, k + reach);
            std::vector<int> offsets;
            for (long j = lo; j <= hi; ++j)
            {
                const SlotUse &u = layout.use(static_cast<std::size_t>(j), user);
                if (u.kind == SlotKind::Pilot && u.index == antenna)
                    offsets.push_back(static_cast<int>(j - k));
            }
            return offsets;
        }

        template <class Corr>
        void solve_normal_equations(InterpolatorCoeffs &c, double snr, Corr &&corr)
        {
            const Eigen::Index m = static_cast<Eigen::Index>(c.offsets.size());
            c.weights.assign(c.offsets.size(), 0.0);
            c.mse = 1.0;
            if (m == 0 || snr == 0.0)
                return;

            Eigen::MatrixXcd cyy(m, m);
            Eigen::VectorXcd chy(m);
            for (Eigen::Index i = 0; i < m; ++i)
            {
                for (Eigen::Index j = 0; j < m; ++j)
                    cyy(i, j) = snr * corr(c.offsets[i] - c.offsets[j]);
                cyy(i, i) += 1.0;
                chy(i) = std::sqrt(snr) * corr(c.offsets[i]);
            }
            const Eigen::LLT<Eigen::MatrixXcd> llt(cyy);
            if (llt.info() != Eigen::Success)
                throw NumericalError("pilot observation covariance is not positive definite");
            const Eigen::VectorXcd w = llt.solve(chy);
            for (Eigen::Index i = 0; i < m; ++i)
                c.weights[static_cast<std::size_t>(i)] = std::conj(w(i));
            c.mse = std::clamp(1.0 - chy.dot(w).real(), 0.0, 1.0);
        }

        void check_target(const Layout &layout, double snr, int user, int antenna, int slot)
        {
            check_user(user);
            if (!(snr >= 0.0))
                throw ConfigError("snr must be non-negative");
            if (antenna < 1 || antenna > layout.antennas.n_t(user))
                throw ConfigError("antenna index out of range");
            if (slot < 0 || static_cast<std::size_t>(slot) >= layout.length())
                throw ConfigError("target slot outside the layout");
        }
    }

    InterpolatorCoeffs lmmse_coefficients(const PowerSpectralDensity &psd, const Layout &layout, double snr,
                                          int user, int antenna, int data_slot)
    {
        check_target(layout, snr, user, antenna, data_slot);
        if (layout.use(static_cast<std::size_t>(data_slot), user).kind != SlotKind::Data)
            throw ConfigError("target slot does not carry data of this user");
        InterpolatorCoeffs c;
        c.user = user;
        c.antenna = antenna;
        c.target_slot = data_slot;
        c.offsets = window_offsets(layout, user, antenna, data_slot);
        solve_normal_equations(c, snr, [&](long lag) { return autocorrelation(psd, lag); });
        return c;
    }

    std::complex<double> estimate_fading(std::span<const std::complex<double>> y_at_pilots,
                                         const InterpolatorCoeffs &coeffs)
    {
        if (y_at_pilots.size() != coeffs.weights.size())
            throw ConfigError("pilot observations do not match the interpolator support");
        std::complex<double> h = 0.0;
        for (std::size_t i = 0; i < y_at_pilots.size(); ++i)
            h += coeffs.weights[i] * y_at_pilots[i];
        return h;
    }

    EstimatorBank::EstimatorBank(const PowerSpectralDensity &psd, const Layout &layout, double snr)
        : layout_(&layout), snr_(snr)
    {
        if (!(snr >= 0.0))
            throw ConfigError("snr must be non-negative");
        std::map<std::vector<int>, std::size_t> seen;
        const auto corr = [&](long lag) {
            auto it = lags_.find(lag);
            if (it == lags_.end())
                it = lags_.emplace(lag, autocorrelation(psd, lag)).first;
            return it->second;
        };
        for (int s = 1; s <= 2; ++s)
        {
            const auto &slots = layout.data_slots[static_cast<std::size_t>(s - 1)];
            auto &by_antenna = index_[static_cast<std::size_t>(s - 1)];
            by_antenna.resize(static_cast<std::size_t>(layout.antennas.n_t(s)));
            for (int t = 1; t <= layout.antennas.n_t(s); ++t)
            {
                auto &ids = by_antenna[static_cast<std::size_t>(t - 1)];
                ids.reserve(slots.size());
                for (int k : slots)
                {
                    std::vector<int> offsets = window_offsets(layout, s, t, k);
                    auto [it, fresh] = seen.emplace(offsets, patterns_.size());
                    if (fresh)
                    {
                        InterpolatorCoeffs c;
                        c.user = s;
                        c.antenna = t;
                        c.target_slot = k;
                        c.offsets = std::move(offsets);
                        solve_normal_equations(c, snr, corr);
                        patterns_.push_back(std::move(c));
                    }
                    ids.push_back(it->second);
                }
            }
        }
    }

    const InterpolatorCoeffs &EstimatorBank::pattern(int user, int antenna, std::size_t position) const
    {
        check_user(user);
        const auto &by_antenna = index_[static_cast<std::size_t>(user - 1)];
        if (antenna < 1 || static_cast<std::size_t>(antenna) > by_antenna.size())
            throw ConfigError("antenna index out of range");
        const auto &ids = by_antenna[static_cast<std::size_t>(antenna - 1)];
        if (position >= ids.size())
            throw ConfigError("codeword position out of range");
        return patterns_[ids[position]];
    }

    InterpolatorCoeffs EstimatorBank::at(int user, int antenna, std::size_t position) const
    {
        InterpolatorCoeffs c = pattern(user, antenna, position);
        c.user = user;
        c.antenna = antenna;
        c.target_slot = layout_->data_slots[static_cast<std::size_t>(user - 1)][position];
        return c;
    }

    double ErrorStats::antenna_sum(int user, int data_phase) const
    {
        double sum = 0.0;
        for (const PhaseError &p : phases)
            if (p.user == user && p.data_phase == data_phase)
                sum += p.analytic;
        return sum;
    }

    int ErrorStats::data_phases(int user) const
    {
        int count = 0;
        for (const PhaseError &p : phases)
            if (p.user == user)
                count = std::max(count, p.data_phase);
        return count;
    }

    double ErrorStats::max_mse(int user) const
    {
        double worst = 0.0;
        for (const PhaseError &p : phases)
            if (p.user == user)
                worst = std::max(worst, p.analytic);
        return worst;
    }

    ErrorStats analytic_error_stats(const PowerSpectralDensity &psd, const Layout &layout, double snr)
    {
        const EstimatorBank bank(psd, layout, snr);
        ErrorStats stats;
        stats.eps2_T = 0.0;
        double asym_max = 0.0;
        for (int s = 1; s <= 2; ++s)
        {
            const auto &slots = layout.data_slots[static_cast<std::size_t>(s - 1)];
            // first codeword position of every slot phase, in phase order
            std::map<int, std::size_t> first;
            for (std::size_t i = 0; i < slots.size(); ++i)
                first.emplace(layout.phase(static_cast<std::size_t>(slots[i])), i);
            int rank = 0;
            for (const auto &[phase, position] : first)
            {
                ++rank;
                for (int t = 1; t <= layout.antennas.n_t(s); ++t)
                {
                    const InterpolatorCoeffs &c = bank.pattern(s, t, position);
                    PhaseError e;
                    e.user = s;
                    e.antenna = t;
                    e.data_phase = rank;
                    e.slot_phase = phase;
                    // distance to the nearest pilot at or before the target
                    int back = layout.period;
                    for (int off : c.offsets)
                        if (off <= 0)
                            back = std::min(back, -off);
                    e.pilot_offset = back % layout.period;
                    e.analytic = c.mse;
                    e.asymptotic = interp_error_asymptotic(psd, layout.period, snr, e.pilot_offset);
                    stats.eps2_T = std::max(stats.eps2_T, e.analytic);
                    asym_max = std::max(asym_max, e.asymptotic);
                    stats.phases.push_back(e);
                }
            }
        }
        if (stats.phases.empty())
            stats.eps2_T = 1.0;
        stats.alias_free = layout.period <= lstar(psd.lambda_d());
        stats.eps2 = stats.alias_free ? interp_error_nyquist(psd, layout.period, snr) : asym_max;
        return stats;
    }

    double EmpiricalProfile::max_empirical() const
    {
        double worst = 0.0;
        for (const EmpiricalPhase &p : phases)
            worst = std::max(worst, p.mse.mean);
        return worst;
    }

    EmpiricalProfile empirical_mse(const PowerSpectralDensity &psd, const Layout &layout, double snr,
                                   std::size_t trials, std::uint64_t seed, const Exec &exec)
    {
        if (trials < 100)
            throw ConfigError("empirical MSE needs at least 100 trials");
        const ErrorStats stats = analytic_error_stats(psd, layout, snr);
        const EstimatorBank bank(psd, layout, snr);
        const Antennas &ant = layout.antennas;
        const std::size_t n_r = static_cast<std::size_t>(ant.n_r);
        const std::size_t links = link_count(ant);
        const std::size_t len = layout.length();
        const FadingGenerator generator(psd, len);
        const double amp = std::sqrt(snr);

        // Target position per phase entry and the slots its interpolator reads.
        std::vector<const InterpolatorCoeffs *> coeffs;
        std::vector<int> targets;
        for (const PhaseError &e : stats.phases)
        {
            const auto &slots = layout.data_slots[static_cast<std::size_t>(e.user - 1)];
            std::size_t pos = 0;
            while (layout.phase(static_cast<std::size_t>(slots[pos])) != e.slot_phase)
                ++pos;
            coeffs.push_back(&bank.pattern(e.user, e.antenna, pos));
            targets.push_back(slots[pos]);
        }

        const std::size_t np = stats.phases.size();
        const std::size_t per_trial = np * n_r;
        std::vector<double> err2(trials * per_trial), pow2(trials * per_trial);
        std::vector<double> cre(trials * per_trial), cim(trials * per_trial);

        for_each_index(exec, trials, [&](std::size_t trial) {
            std::vector<std::complex<double>> h(links * len);
            for (std::size_t l = 0; l < links; ++l)
                generator.generate(derive_key(seed, {1, trial, l}),
                                   std::span<std::complex<double>>(h).subspan(l * len, len));
            std::vector<std::complex<double>> y;
            for (std::size_t r = 0; r < n_r; ++r)
            {
                // noise of antenna r over every slot, drawn in slot order
                ComplexGaussian noise(derive_key(seed, {2, trial, r}));
                std::vector<std::complex<double>> z(len);
                for (auto &v : z)
                    v = noise();
                for (std::size_t p = 0; p < np; ++p)
                {
                    const PhaseError &e = stats.phases[p];
                    const InterpolatorCoeffs &c = *coeffs[p];
                    const std::size_t link = link_index(ant, e.user, static_cast<int>(r), e.antenna - 1);
                    const std::complex<double> *hl = h.data() + link * len;
                    y.resize(c.offsets.size());
                    for (std::size_t i = 0; i < c.offsets.size(); ++i)
                    {
                        const std::size_t k = static_cast<std::size_t>(targets[p] + c.offsets[i]);
                        y[i] = amp * hl[k] + z[k];
                    }
                    const std::complex<double> est = estimate_fading(y, c);
                    const std::complex<double> err = hl[targets[p]] - est;
                    const std::size_t idx = trial * per_trial + p * n_r + r;
                    err2[idx] = std::norm(err);
                    pow2[idx] = std::norm(est);
                    const std::complex<double> cross = est * std::conj(err);
                    cre[idx] = cross.real();
                    cim[idx] = cross.imag();
                }
            }
        });

        EmpiricalProfile out;
        out.eps2_T = stats.eps2_T;
        out.trials = trials;
        const auto gather = [&](const std::vector<double> &src, std::size_t p, std::size_t r_only, bool all_r) {
            std::vector<double> v;
            v.reserve(trials * n_r);
            for (std::size_t trial = 0; trial < trials; ++trial)
                for (std::size_t r = 0; r < n_r; ++r)
                    if (all_r || r == r_only)
                        v.push_back(src[trial * per_trial + p * n_r + r]);
            return mean_estimate(v);
        };
        for (std::size_t p = 0; p < np; ++p)
        {
            EmpiricalPhase ph;
            ph.reference = stats.phases[p];
            ph.mse = gather(err2, p, 0, true);
            for (std::size_t r = 0; r < n_r; ++r)
                ph.per_rx.push_back(gather(err2, p, r, false));
            ph.estimate_power = gather(pow2, p, 0, true);
            ph.cross_re = gather(cre, p, 0, true);
            ph.cross_im = gather(cim, p, 0, true);
            out.phases.push_back(std::move(ph));
        }
        return out;
    }

    void write_mse_csv(std::ostream &out, const EmpiricalProfile &profile)
    {
        out << "phase_ell,analytic_mse,empirical_mse,stderr,user,antenna,pilot_offset,asymptotic_mse,eps2_T\n";
        const auto old = out.precision(17);
        for (const EmpiricalPhase &p : profile.phases)
        {
            const PhaseError &e = p.reference;
            out << e.slot_phase << ',' << e.analytic << ',' << p.mse.mean << ',' << p.mse.std_error << ','
                << e.user << ',' << e.antenna << ',' << e.pilot_offset << ',' << e.asymptotic << ','
                << profile.eps2_T << '\n';
        }
        out.precision(old);
    }
}
