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

#ifndef PILOTMAC_CONFIG_HPP
#define PILOTMAC_CONFIG_HPP

#include "pilotmac/errors.hpp"
#include "pilotmac/spectra.hpp"

namespace pmac
{
    // Antenna counts of the two-user MAC. Users are numbered 1 and 2.
    struct Antennas
    {
        int n_t1 = 1;
        int n_t2 = 1;
        int n_r = 1;

        int n_t(int user) const { return user == 1 ? n_t1 : n_t2; }
        int total_tx() const { return n_t1 + n_t2; }

        void validate() const
        {
            if (n_t1 < 1 || n_t2 < 1 || n_r < 1)
                throw ConfigError("antenna counts must be >= 1");
        }
    };

    inline void check_user(int user)
    {
        if (user != 1 && user != 2)
            throw ConfigError("user index must be 1 or 2");
    }

    // Parameters shared by the estimator, decoder and GMI evaluators.
    // snr is the linear per-antenna SNR.
    struct SystemConfig
    {
        Antennas antennas;
        double snr = 1.0;
        int pilot_period = 1; // L
        int window = 1;       // T
        PowerSpectralDensity psd = PowerSpectralDensity::brickwall(0.25);

        void validate() const
        {
            antennas.validate();
            if (!(snr >= 0.0))
                throw ConfigError("snr must be non-negative");
            if (window < 1)
                throw ConfigError("estimator window T must be >= 1");
            if (pilot_period < antennas.total_tx())
                throw PeriodTooShort("pilot period L must be at least n_t1 + n_t2");
        }
    };
}

#endif
