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

#ifndef PILOTMAC_SCHEME_HPP
#define PILOTMAC_SCHEME_HPP

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pilotmac/config.hpp"

namespace pmac
{
    enum class SlotKind
    {
        Silent,
        Pilot,
        Data
    };

    // What one user sends in one slot. For pilots `index` is the 1-based transmit
    // antenna; for data it is the 0-based position within the user's codeword.
    struct SlotUse
    {
        SlotKind kind = SlotKind::Silent;
        int index = 0;
    };

    struct LayoutCounts
    {
        long n = 0;       // data symbols
        long n_p = 0;     // pilot slots
        long n_g = 0;     // guard slots without pilots
        long n_prime = 0; // n_p + n + n_g
    };

    enum class SchemeKind
    {
        Joint,
        Tdma
    };

    // Slot-by-slot assignment of pilots, data and silence for both users.
    // Slots are 0-based and the phase of slot k is k mod L.
    struct Layout
    {
        SchemeKind scheme = SchemeKind::Joint;
        Antennas antennas;
        int period = 1; // L
        int window = 1; // T
        std::vector<std::array<SlotUse, 2>> slots;

        // Per-user counts. Both entries are equal for the joint scheme.
        std::array<LayoutCounts, 2> counts{};
        // Joint scheme: block-length counts. TDMA: counts of the joint layout whose
        // length is split between the users.
        LayoutCounts total{};
        // Fraction of periods given to user 1 (TDMA); 1 for the joint scheme.
        double beta = 1.0;

        // data_slots[s-1][i]: slot carrying codeword position i of user s.
        std::array<std::vector<int>, 2> data_slots;
        std::vector<int> pilot_slots; // slots where any user sends a pilot
        std::vector<int> data_union;  // slots where any user sends data

        std::size_t length() const { return slots.size(); }
        const SlotUse &use(std::size_t slot, int user) const { return slots[slot][static_cast<std::size_t>(user - 1)]; }
        int phase(std::size_t slot) const { return static_cast<int>(slot % static_cast<std::size_t>(period)); }
    };

    // Orthogonal pilot: unit vector selecting `antenna` (1-based) of `user`.
    Eigen::VectorXcd pilot_vector(const Antennas &antennas, int user, int antenna);

    // Joint-transmission layout: every period starts with the pilots of user 1 then
    // user 2, data blocks of L - n_t1 - n_t2 symbols follow, and a guard of T - 1
    // pilot-only periods sits before the first and after the last data block.
    Layout build_joint_layout(const Antennas &antennas, int period, int window, long n);

    // TDMA layout: the joint block length, rounded up to whole periods, is split so
    // that user 1 runs the single-user scheme on the first round(beta * periods)
    // periods and user 2 on the rest. A segment too short for one data block stays
    // silent. The achieved beta is stored in the layout.
    Layout build_tdma_layout(const Antennas &antennas, int period, int window, long n, double beta);

    // Debug dump: array of {slot, user, kind, antenna_or_block}.
    nlohmann::json layout_to_json(const Layout &layout);

    // Joint-scheme counts from the closed-form block-length expressions.
    LayoutCounts joint_counts(const Antennas &antennas, int period, int window, long n);
}

#endif
