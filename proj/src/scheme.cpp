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

#include "pilotmac/scheme.hpp"

#include <cmath>
#include <sstream>

namespace pmac
{
    namespace
    {
        void check_common(const Antennas &antennas, int period, int window, long n)
        {
            antennas.validate();
            if (window < 1)
                throw ConfigError("estimator window T must be >= 1");
            if (n < 0)
                throw ConfigError("codeword length n must be non-negative");
            if (period < antennas.total_tx())
                throw PeriodTooShort("pilot period L must be at least n_t1 + n_t2");
            const int block = period - antennas.total_tx();
            if ((block == 0 && n != 0) || (block > 0 && n % block != 0))
            {
                std::ostringstream msg;
                msg << "codeword length " << n << " is not a multiple of the data block length " << block;
                throw DivisibilityError(msg.str());
            }
        }

        void collect_sets(Layout &layout)
        {
            for (std::size_t k = 0; k < layout.slots.size(); ++k)
            {
                bool pilot = false, data = false;
                for (int s = 1; s <= 2; ++s)
                {
                    const SlotUse &u = layout.use(k, s);
                    if (u.kind == SlotKind::Pilot)
                        pilot = true;
                    if (u.kind == SlotKind::Data)
                    {
                        data = true;
                        auto &list = layout.data_slots[static_cast<std::size_t>(s - 1)];
                        if (static_cast<int>(list.size()) != u.index)
                            throw std::logic_error("codeword positions out of order");
                        list.push_back(static_cast<int>(k));
                    }
                }
                if (pilot)
                    layout.pilot_slots.push_back(static_cast<int>(k));
                if (data)
                    layout.data_union.push_back(static_cast<int>(k));
            }
        }

        // Writes one single-user segment of `periods` whole periods starting at `offset`.
        // Returns the data count, or 0 when the segment cannot carry a data block.
        long write_single_user_segment(Layout &layout, int user, std::size_t offset, long periods)
        {
            const int n_t = layout.antennas.n_t(user);
            const int period = layout.period;
            const long data_periods = periods - (2L * layout.window - 1);
            if (periods <= 0 || data_periods < 1)
                return 0;
            const std::size_t s = static_cast<std::size_t>(user - 1);
            long position = 0;
            for (long q = 0; q < periods; ++q)
            {
                const std::size_t base = offset + static_cast<std::size_t>(q * period);
                for (int t = 0; t < n_t; ++t)
                    layout.slots[base + static_cast<std::size_t>(t)][s] = {SlotKind::Pilot, t + 1};
                if (q >= layout.window - 1 && q < layout.window - 1 + data_periods)
                    for (int j = n_t; j < period; ++j)
                        layout.slots[base + static_cast<std::size_t>(j)][s] = {SlotKind::Data, static_cast<int>(position++)};
            }
            return position;
        }
    }

    Eigen::VectorXcd pilot_vector(const Antennas &antennas, int user, int antenna)
    {
        check_user(user);
        const int n_t = antennas.n_t(user);
        if (antenna < 1 || antenna > n_t)
            throw ConfigError("pilot antenna index out of range");
        Eigen::VectorXcd p = Eigen::VectorXcd::Zero(n_t);
        p(antenna - 1) = 1.0;
        return p;
    }

    LayoutCounts joint_counts(const Antennas &antennas, int period, int window, long n)
    {
        check_common(antennas, period, window, n);
        const long sum_t = antennas.total_tx();
        const long block = period - sum_t;
        const long blocks = block > 0 ? n / block : 0;
        LayoutCounts c;
        c.n = n;
        c.n_p = (blocks + 1 + 2L * (window - 1)) * sum_t;
        c.n_g = 2L * block * (window - 1);
        c.n_prime = c.n_p + c.n + c.n_g;
        return c;
    }

    Layout build_joint_layout(const Antennas &antennas, int period, int window, long n)
    {
        const LayoutCounts counts = joint_counts(antennas, period, window, n);
        const int sum_t = antennas.total_tx();
        const int block = period - sum_t;
        const long blocks = block > 0 ? n / block : 0;
        const long pilot_periods = blocks + 1 + 2L * (window - 1);

        Layout layout;
        layout.scheme = SchemeKind::Joint;
        layout.antennas = antennas;
        layout.period = period;
        layout.window = window;
        layout.counts = {counts, counts};
        layout.total = counts;
        layout.slots.resize(static_cast<std::size_t>(counts.n_prime));

        long position = 0;
        for (long p = 0; p < pilot_periods; ++p)
        {
            const std::size_t base = static_cast<std::size_t>(p * period);
            for (int i = 0; i < sum_t; ++i)
            {
                const int user = i < antennas.n_t1 ? 1 : 2;
                const int antenna = user == 1 ? i + 1 : i - antennas.n_t1 + 1;
                layout.slots[base + static_cast<std::size_t>(i)][static_cast<std::size_t>(user - 1)] = {SlotKind::Pilot, antenna};
            }
            if (p >= window - 1 && p < window - 1 + blocks)
            {
                for (int j = sum_t; j < period; ++j)
                {
                    const SlotUse data{SlotKind::Data, static_cast<int>(position++)};
                    layout.slots[base + static_cast<std::size_t>(j)] = {data, data};
                }
            }
        }
        collect_sets(layout);
        return layout;
    }

    Layout build_tdma_layout(const Antennas &antennas, int period, int window, long n, double beta)
    {
        if (!(beta >= 0.0 && beta <= 1.0))
            throw ConfigError("beta must lie in [0, 1]");
        const LayoutCounts joint = joint_counts(antennas, period, window, n);
        const long total_periods = (joint.n_prime + period - 1) / period;
        const long periods_1 = std::lround(beta * static_cast<double>(total_periods));
        const long periods_2 = total_periods - periods_1;

        Layout layout;
        layout.scheme = SchemeKind::Tdma;
        layout.antennas = antennas;
        layout.period = period;
        layout.window = window;
        layout.total = joint;
        layout.beta = static_cast<double>(periods_1) / static_cast<double>(total_periods);
        layout.slots.resize(static_cast<std::size_t>(total_periods * period));

        const std::array<long, 2> periods{periods_1, periods_2};
        std::size_t offset = 0;
        for (int user = 1; user <= 2; ++user)
        {
            const long segment = periods[static_cast<std::size_t>(user - 1)];
            const int n_t = antennas.n_t(user);
            const long data = write_single_user_segment(layout, user, offset, segment);
            LayoutCounts &c = layout.counts[static_cast<std::size_t>(user - 1)];
            if (data > 0)
            {
                const long data_periods = data / (period - n_t);
                c.n = data;
                c.n_p = (data_periods + 1 + 2L * (window - 1)) * n_t;
                c.n_g = 2L * (period - n_t) * (window - 1);
                c.n_prime = c.n_p + c.n + c.n_g;
            }
            offset += static_cast<std::size_t>(segment * period);
        }
        collect_sets(layout);
        return layout;
    }

    nlohmann::json layout_to_json(const Layout &layout)
    {
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t k = 0; k < layout.length(); ++k)
            for (int s = 1; s <= 2; ++s)
            {
                const SlotUse &u = layout.use(k, s);
                nlohmann::json row{{"slot", k}, {"user", s}};
                switch (u.kind)
                {
                case SlotKind::Pilot:
                    row["kind"] = "pilot";
                    row["antenna_or_block"] = u.index;
                    break;
                case SlotKind::Data:
                    row["kind"] = "data";
                    row["antenna_or_block"] = u.index;
                    break;
                case SlotKind::Silent:
                    row["kind"] = "silent";
                    row["antenna_or_block"] = nullptr;
                    break;
                }
                out.push_back(std::move(row));
            }
        return out;
    }
}
