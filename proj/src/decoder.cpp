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

#include "pilotmac/decoder.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pilotmac/channel.hpp"
#include "pilotmac/errors.hpp"
#include "pilotmac/estimator.hpp"
#include "pilotmac/random.hpp"
#include "pilotmac/stats.hpp"

namespace pmac
{
    namespace
    {
        using Vec = Eigen::VectorXcd;

        // Both the metric and the decoder accumulate residual norms through these two
        // helpers, so the enumerated values match metric() bit for bit.
        Vec contribution(const Eigen::MatrixXcd &h, const Eigen::Map<const Vec> &x, double amp)
        {
            Vec u = h * x;
            u *= amp;
            return u;
        }

        double residual_norm(const Vec &r, const Vec &u)
        {
            double s = 0.0;
            for (Eigen::Index i = 0; i < r.size(); ++i)
                s += std::norm(r(i) - u(i));
            return s;
        }

        void check_observation(const DataObservation &obs, const Codebook &cb, const std::vector<Eigen::MatrixXcd> &h)
        {
            if (static_cast<long>(obs.y.size()) != cb.length() || h.size() != obs.y.size())
                throw ConfigError("observation length does not match the codeword length");
            for (std::size_t k = 0; k < h.size(); ++k)
                if (h[k].cols() != cb.n_t() || h[k].rows() != obs.y[k].size())
                    throw ConfigError("fading estimate has the wrong dimensions");
        }

        const std::vector<Eigen::MatrixXcd> &estimates_of(const DataObservation &obs, int user)
        {
            return user == 1 ? obs.h1 : obs.h2;
        }

        // u[m][k] = sqrt(SNR) H_k x_k(m)
        std::vector<std::vector<Vec>> contributions(const DataObservation &obs, const Codebook &cb, double snr)
        {
            const auto &h = estimates_of(obs, cb.user());
            const double amp = std::sqrt(snr);
            std::vector<std::vector<Vec>> u(cb.size());
            for (std::size_t m = 0; m < cb.size(); ++m)
            {
                u[m].reserve(obs.y.size());
                for (std::size_t k = 0; k < obs.y.size(); ++k)
                    u[m].push_back(contribution(h[k], cb.symbol(m, static_cast<long>(k)), amp));
            }
            return u;
        }

        RateEstimate rate_estimate(std::size_t errors, std::size_t trials)
        {
            RateEstimate r;
            r.errors = errors;
            r.p = static_cast<double>(errors) / static_cast<double>(trials);
            r.ci95 = wilson_interval(errors, trials);
            return r;
        }
    }

    std::size_t message_count(double rate, long n)
    {
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw ConfigError("rates must be finite and non-negative");
        if (n < 0)
            throw ConfigError("codeword length must be non-negative");
        const double nr = rate * static_cast<double>(n);
        if (nr > std::log(static_cast<double>(max_message_pairs)) + 1e-9)
            throw BudgetError("codebook larger than the enumeration budget of 2^20 messages");
        const double nearest = std::round(std::exp(nr));
        if (std::abs(nr - std::log(nearest)) <= 1e-12)
            return static_cast<std::size_t>(nearest);
        return static_cast<std::size_t>(std::ceil(std::exp(nr)));
    }

    Codebook::Codebook(int user, int n_t, double rate, long n, long length, std::uint64_t seed)
        : user_(user), n_t_(n_t), rate_(rate), length_(length), messages_(message_count(rate, n))
    {
        check_user(user);
        if (n_t < 1 || length < 0)
            throw ConfigError("codebook dimensions must be positive");
        entries_.resize(messages_ * static_cast<std::size_t>(length) * static_cast<std::size_t>(n_t));
        std::size_t i = 0;
        for (std::size_t m = 0; m < messages_; ++m)
        {
            ComplexGaussian draw(derive_key(seed, {static_cast<std::uint64_t>(user), m}));
            for (long k = 0; k < length * n_t; ++k)
                entries_[i++] = draw();
        }
    }

    double metric(const DataObservation &obs, const Codebook &cb1, std::size_t m1,
                  const Codebook &cb2, std::size_t m2, double snr)
    {
        check_observation(obs, cb1, obs.h1);
        check_observation(obs, cb2, obs.h2);
        if (m1 >= cb1.size() || m2 >= cb2.size())
            throw ConfigError("message index out of range");
        const double amp = std::sqrt(snr);
        double d = 0.0;
        for (std::size_t k = 0; k < obs.y.size(); ++k)
        {
            const Vec r = obs.y[k] - contribution(obs.h1[k], cb1.symbol(m1, static_cast<long>(k)), amp);
            d += residual_norm(r, contribution(obs.h2[k], cb2.symbol(m2, static_cast<long>(k)), amp));
        }
        return d;
    }

    double metric_single(const DataObservation &obs, const Codebook &cb, std::size_t m, double snr)
    {
        const auto &h = estimates_of(obs, cb.user());
        check_observation(obs, cb, h);
        if (m >= cb.size())
            throw ConfigError("message index out of range");
        const double amp = std::sqrt(snr);
        double d = 0.0;
        for (std::size_t k = 0; k < obs.y.size(); ++k)
            d += residual_norm(obs.y[k], contribution(h[k], cb.symbol(m, static_cast<long>(k)), amp));
        return d;
    }

    const char *to_string(ErrorEvent e)
    {
        switch (e)
        {
        case ErrorEvent::None:
            return "none";
        case ErrorEvent::User1Only:
            return "user1_only";
        case ErrorEvent::User2Only:
            return "user2_only";
        case ErrorEvent::Both:
            return "both";
        }
        return "unknown";
    }

    ErrorEvent classify(std::size_t m1, std::size_t m2)
    {
        if (m1 != 0 && m2 != 0)
            return ErrorEvent::Both;
        if (m1 != 0)
            return ErrorEvent::User1Only;
        if (m2 != 0)
            return ErrorEvent::User2Only;
        return ErrorEvent::None;
    }

    Decision decode(const DataObservation &obs, const Codebook &cb1, const Codebook &cb2, double snr, const Exec &exec)
    {
        check_observation(obs, cb1, obs.h1);
        check_observation(obs, cb2, obs.h2);
        if (cb1.size() > max_message_pairs / cb2.size())
            throw BudgetError("joint decoding exceeds the budget of 2^20 message pairs");

        const auto u1 = contributions(obs, cb1, snr);
        const auto u2 = contributions(obs, cb2, snr);
        const std::size_t n = obs.y.size();

        // Row minimum per m1; strict comparison keeps the smallest m2 on ties.
        std::vector<std::size_t> arg(cb1.size());
        std::vector<double> best(cb1.size());
        for_each_index(exec, cb1.size(), [&](std::size_t m1) {
            std::vector<Vec> r(n);
            for (std::size_t k = 0; k < n; ++k)
                r[k] = obs.y[k] - u1[m1][k];
            double row_best = std::numeric_limits<double>::infinity();
            std::size_t row_arg = 0;
            for (std::size_t m2 = 0; m2 < cb2.size(); ++m2)
            {
                double d = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    d += residual_norm(r[k], u2[m2][k]);
                if (d < row_best)
                {
                    row_best = d;
                    row_arg = m2;
                }
            }
            best[m1] = row_best;
            arg[m1] = row_arg;
        });

        Decision out;
        out.value = std::numeric_limits<double>::infinity();
        for (std::size_t m1 = 0; m1 < cb1.size(); ++m1)
            if (best[m1] < out.value)
            {
                out.value = best[m1];
                out.m1 = m1;
                out.m2 = arg[m1];
            }
        out.event = classify(out.m1, out.m2);
        return out;
    }

    std::pair<std::size_t, double> decode_single(const DataObservation &obs, const Codebook &cb, double snr)
    {
        std::pair<std::size_t, double> best{0, std::numeric_limits<double>::infinity()};
        for (std::size_t m = 0; m < cb.size(); ++m)
        {
            const double d = metric_single(obs, cb, m, snr);
            if (d < best.second)
                best = {m, d};
        }
        return best;
    }

    ErrorReport run_mc_experiment(const ExperimentSettings &settings, const Exec &exec)
    {
        const SystemConfig &sys = settings.system;
        sys.validate();
        if (settings.trials < 1)
            throw ConfigError("at least one trial is required");
        const Antennas &ant = sys.antennas;
        const Layout layout = settings.scheme.kind == SchemeKind::Joint
                                  ? build_joint_layout(ant, sys.pilot_period, sys.window, settings.n)
                                  : build_tdma_layout(ant, sys.pilot_period, sys.window, settings.n, settings.scheme.beta);

        const std::array<std::size_t, 2> messages{message_count(settings.rates[0], settings.n),
                                                  message_count(settings.rates[1], settings.n)};
        if (settings.scheme.kind == SchemeKind::Joint && messages[0] > max_message_pairs / messages[1])
            throw BudgetError("joint decoding exceeds the budget of 2^20 message pairs");

        const EstimatorBank bank(sys.psd, layout, sys.snr);
        const FadingGenerator generator(sys.psd, layout.length());
        const std::size_t len = layout.length();
        const std::size_t links = link_count(ant);
        const int n_r = ant.n_r;
        const double amp = std::sqrt(sys.snr);

        std::vector<ErrorEvent> events(settings.trials);
        for_each_index(exec, settings.trials, [&](std::size_t trial) {
            const std::uint64_t cb_seed = derive_key(settings.seed, {3, trial});
            const std::array<Codebook, 2> books{
                Codebook(1, ant.n_t1, settings.rates[0], settings.n, layout.counts[0].n, cb_seed),
                Codebook(2, ant.n_t2, settings.rates[1], settings.n, layout.counts[1].n, cb_seed)};

            FadingRealization fading;
            fading.num_links = links;
            fading.length = len;
            fading.samples.resize(links * len);
            for (std::size_t l = 0; l < links; ++l)
                generator.generate(derive_key(settings.seed, {1, trial, l}),
                                   std::span<std::complex<double>>(fading.samples).subspan(l * len, len));

            // Outputs of every receive antenna over the whole layout, r-major.
            std::vector<std::complex<double>> y(static_cast<std::size_t>(n_r) * len);
            for (int r = 0; r < n_r; ++r)
            {
                ComplexGaussian noise(derive_key(settings.seed, {2, trial, static_cast<std::uint64_t>(r)}));
                for (std::size_t k = 0; k < len; ++k)
                    y[static_cast<std::size_t>(r) * len + k] = noise();
            }
            for (std::size_t k = 0; k < len; ++k)
                for (int s = 1; s <= 2; ++s)
                {
                    const SlotUse &u = layout.use(k, s);
                    if (u.kind == SlotKind::Silent)
                        continue;
                    for (int t = 0; t < ant.n_t(s); ++t)
                    {
                        std::complex<double> x;
                        if (u.kind == SlotKind::Pilot)
                            x = (u.index == t + 1) ? 1.0 : 0.0;
                        else
                            x = books[static_cast<std::size_t>(s - 1)].symbol(0, u.index)(t);
                        if (x == 0.0)
                            continue;
                        for (int r = 0; r < n_r; ++r)
                            y[static_cast<std::size_t>(r) * len + k] += amp * fading.sample(link_index(ant, s, r, t), k) * x;
                    }
                }

            const auto estimate = [&](int s, std::size_t pos) {
                const int k = layout.data_slots[static_cast<std::size_t>(s - 1)][pos];
                if (settings.genie_csi)
                    return Eigen::MatrixXcd(fading_matrix(fading, ant, s, static_cast<std::size_t>(k)));
                Eigen::MatrixXcd h(n_r, ant.n_t(s));
                for (int t = 1; t <= ant.n_t(s); ++t)
                {
                    const InterpolatorCoeffs &c = bank.pattern(s, t, pos);
                    for (int r = 0; r < n_r; ++r)
                    {
                        std::complex<double> v = 0.0;
                        for (std::size_t i = 0; i < c.offsets.size(); ++i)
                            v += c.weights[i] * y[static_cast<std::size_t>(r) * len + static_cast<std::size_t>(k + c.offsets[i])];
                        h(r, t - 1) = v;
                    }
                }
                return h;
            };
            const auto output = [&](int k) {
                Eigen::VectorXcd v(n_r);
                for (int r = 0; r < n_r; ++r)
                    v(r) = y[static_cast<std::size_t>(r) * len + static_cast<std::size_t>(k)];
                return v;
            };

            if (layout.scheme == SchemeKind::Joint)
            {
                DataObservation obs;
                for (std::size_t i = 0; i < layout.data_slots[0].size(); ++i)
                {
                    obs.y.push_back(output(layout.data_slots[0][i]));
                    obs.h1.push_back(estimate(1, i));
                    obs.h2.push_back(estimate(2, i));
                }
                events[trial] = decode(obs, books[0], books[1], sys.snr, Exec::serial()).event;
                return;
            }

            std::array<std::size_t, 2> decided{0, 0};
            for (int s = 1; s <= 2; ++s)
            {
                const std::size_t si = static_cast<std::size_t>(s - 1);
                const auto &slots = layout.data_slots[si];
                if (slots.empty())
                {
                    decided[si] = messages[si] > 1 ? 1 : 0;
                    continue;
                }
                DataObservation obs;
                auto &h = s == 1 ? obs.h1 : obs.h2;
                for (std::size_t i = 0; i < slots.size(); ++i)
                {
                    obs.y.push_back(output(slots[i]));
                    h.push_back(estimate(s, i));
                }
                decided[si] = decode_single(obs, books[si], sys.snr).first;
            }
            events[trial] = classify(decided[0], decided[1]);
        });

        ErrorReport rep;
        rep.scheme = layout.scheme;
        rep.beta = layout.beta;
        rep.snr_db = 10.0 * std::log10(sys.snr);
        rep.rates = settings.rates;
        rep.messages = messages;
        rep.n = settings.n;
        rep.trials = settings.trials;
        rep.genie_csi = settings.genie_csi;
        for (ErrorEvent e : events)
            ++rep.events[static_cast<std::size_t>(e)];
        const auto &ev = rep.events;
        const std::size_t both = ev[3];
        rep.user1 = rate_estimate(ev[1] + both, settings.trials);
        rep.user2 = rate_estimate(ev[2] + both, settings.trials);
        rep.both = rate_estimate(both, settings.trials);
        rep.any = rate_estimate(ev[1] + ev[2] + both, settings.trials);
        return rep;
    }

    nlohmann::json to_json(const ErrorReport &r)
    {
        const auto ci = [](const RateEstimate &e) { return nlohmann::json::array({e.ci95.first, e.ci95.second}); };
        return {
            {"scheme", r.scheme == SchemeKind::Joint ? "joint" : "tdma"},
            {"beta", r.beta},
            {"snr_db", r.snr_db},
            {"rates", r.rates},
            {"messages", r.messages},
            {"n", r.n},
            {"trials", r.trials},
            {"genie_csi", r.genie_csi},
            {"p_err_user1", r.user1.p},
            {"p_err_user2", r.user2.p},
            {"p_err_both", r.both.p},
            {"p_err_any", r.any.p},
            {"ci_95", {{"user1", ci(r.user1)}, {"user2", ci(r.user2)}, {"both", ci(r.both)}, {"any", ci(r.any)}}},
            {"events", {{"none", r.events[0]}, {"user1_only", r.events[1]}, {"user2_only", r.events[2]}, {"both", r.events[3]}}},
        };
    }
}
