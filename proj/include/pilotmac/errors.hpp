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

#ifndef PILOTMAC_ERRORS_HPP
#define PILOTMAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pmac
{
    // Invalid user input: bad dimensions, out-of-range parameters, malformed files.
    // The CLI maps this to exit code 2.
    class ConfigError : public std::invalid_argument
    {
    public:
        explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
    };

    // Pilot period exceeds the largest alias-free period for the fading bandwidth.
    class NyquistViolation : public ConfigError
    {
    public:
        explicit NyquistViolation(const std::string &what) : ConfigError(what) {}
    };

    // n is not a whole number of data blocks
    class DivisibilityError : public ConfigError
    {
    public:
        explicit DivisibilityError(const std::string &what) : ConfigError(what) {}
    };

    // L < n_t1 + n_t2 (no room for the pilot prefix)
    class PeriodTooShort : public ConfigError
    {
    public:
        explicit PeriodTooShort(const std::string &what) : ConfigError(what) {}
    };

    // Quadrature did not converge, or a Monte Carlo estimate missed its requested precision.
    // The CLI maps this to exit code 3.
    class NumericalError : public std::runtime_error
    {
    public:
        explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
    };

    // Requested work exceeds the desk-scale budget (e.g. too many message pairs).
    class BudgetError : public NumericalError
    {
    public:
        explicit BudgetError(const std::string &what) : NumericalError(what) {}
    };
}

#endif
