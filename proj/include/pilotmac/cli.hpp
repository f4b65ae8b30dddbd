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

#ifndef PILOTMAC_CLI_HPP
#define PILOTMAC_CLI_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilotmac/config.hpp"
#include "pilotmac/scheme.hpp"

namespace pmac
{
    inline constexpr const char *config_schema = "pilotmac-config/1";

    // Typed view of a run configuration file (JSON). Keys are read on demand so each
    // subcommand only requires what it uses; a missing or mistyped key raises
    // ConfigError naming the dotted key path.
    class RunConfig
    {
    public:
        RunConfig(nlohmann::json doc, std::filesystem::path base_dir);
        static RunConfig load(const std::filesystem::path &path);

        const nlohmann::json &document() const { return doc_; }

        Antennas antennas() const;
        PowerSpectralDensity psd() const;
        std::vector<double> snr_db() const;  // non-empty, finite
        int pilot_period() const;             // "L"
        std::vector<int> windows() const;     // "T": integer or list
        long codeword_length() const;         // "n"
        std::vector<double> betas() const;    // "beta": number or list; default [0.5]
        SchemeKind scheme() const;            // "scheme": "joint" (default) or "tdma"
        std::uint64_t seed() const;           // "seed", default 0
        std::array<double, 2> rates() const;  // "decode.rates"
        bool genie_csi() const;               // "decode.genie_csi", default false
        std::size_t budget(const std::string &name, std::size_t fallback) const; // "mc.<name>"
        std::optional<std::string> output_dir() const;

        // FNV-1a 64 over the canonical (sorted-key, compact) serialization.
        std::uint64_t hash() const;

    private:
        const nlohmann::json *find(const std::string &dotted) const;
        const nlohmann::json &require(const std::string &dotted) const;

        nlohmann::json doc_;
        std::filesystem::path base_dir_;
    };

    std::uint64_t fnv1a64(const std::string &bytes);

    // Entry point of the command-line tool. Returns the process exit code:
    // 0 success, 2 configuration error, 3 numerical or budget error.
    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}

#endif
