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

#ifndef PILOTMAC_DECODER_HPP
#define PILOTMAC_DECODER_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pilotmac/config.hpp"
#include "pilotmac/parallel.hpp"
#include "pilotmac/scheme.hpp"

namespace pmac
{
    // Largest number of message pairs a joint decoder may enumerate.
    inline constexpr std::size_t max_message_pairs = std::size_t{1} << 20;

    // ceil(exp(n R)) with natural-log rates. Values of n R within 1e-12 of log(integer)
    // round to that integer. Throws BudgetError above max_message_pairs.
    std::size_t message_count(double rate, long n);

    // i.i.d. CN(0, I) codebook. Message m is drawn from the stream
    // derive_key(seed, {user, m}), symbol by symbol and antenna by antenna.
    class Codebook
    {
    public:
        Codebook(int user, int n_t, double rate, long n, long length, std::uint64_t seed);

        int user() const { return user_; }
        int n_t() const { return n_t_; }
        double rate() const { return rate_; }
        std::size_t size() const { return messages_; }
        long length() const { return length_; } // symbols per codeword

        // x_{position}(message), an n_t vector.
        Eigen::Map<const Eigen::VectorXcd> symbol(std::size_t message, long position) const
        {
            return Eigen::Map<const Eigen::VectorXcd>(
                entries_.data() + (message * static_cast<std::size_t>(length_) + static_cast<std::size_t>(position)) * n_t_, n_t_);
        }

    private:
        int user_;
        int n_t_;
        double rate_;
        long length_;
        std::size_t messages_;
        std::vector<std::complex<double>> entries_;
    };

    // Channel outputs and fading estimates on the data slots, in codeword order.
    // For a user that is silent on these slots, its estimate vector is empty.
    struct DataObservation
    {
        std::vector<Eigen::VectorXcd> y;
        std::vector<Eigen::MatrixXcd> h1;
        std::vector<Eigen::MatrixXcd> h2;
    };

    // sum_k || y_k - sqrt(SNR) H1_k x1_k - sqrt(SNR) H2_k x2_k ||^2
    double metric(const DataObservation &obs, const Codebook &cb1, std::size_t m1,
                  const Codebook &cb2, std::size_t m2, double snr);

    // Single-user form: sum_k || y_k - sqrt(SNR) H_k x_k ||^2, H taken from obs.h1 or obs.h2.
    double metric_single(const DataObservation &obs, const Codebook &cb, std::size_t m, double snr);

    enum class ErrorEvent
    {
        None,
        User1Only,
        User2Only,
        Both
    };

    const char *to_string(ErrorEvent e);

    // Classifies a decision against the transmitted pair (0, 0).
    ErrorEvent classify(std::size_t m1, std::size_t m2);

    struct Decision
    {
        std::size_t m1 = 0;
        std::size_t m2 = 0;
        double value = 0.0;
        ErrorEvent event = ErrorEvent::None;
    };

    // Exhaustive joint nearest-neighbour decoding. Ties resolve to the
    // lexicographically smallest (m1, m2). Throws BudgetError above max_message_pairs.
    Decision decode(const DataObservation &obs, const Codebook &cb1, const Codebook &cb2, double snr,
                    const Exec &exec = Exec::serial());

    // Exhaustive single-user decoding; ties resolve to the smallest index.
    std::pair<std::size_t, double> decode_single(const DataObservation &obs, const Codebook &cb, double snr);

    struct SchemeSpec
    {
        SchemeKind kind = SchemeKind::Joint;
        double beta = 0.5; // TDMA only
    };

    struct ExperimentSettings
    {
        SystemConfig system;
        std::array<double, 2> rates{0.0, 0.0}; // nats per channel use
        long n = 0;                            // joint-scheme codeword length
        std::size_t trials = 100;
        SchemeSpec scheme;
        std::uint64_t seed = 0;
        bool genie_csi = false; // decode with the true fading instead of the estimates
    };

    struct RateEstimate
    {
        std::size_t errors = 0;
        double p = 0.0;
        std::pair<double, double> ci95{0.0, 1.0};
    };

    struct ErrorReport
    {
        SchemeKind scheme = SchemeKind::Joint;
        double beta = 1.0; // achieved
        double snr_db = 0.0;
        std::array<double, 2> rates{0.0, 0.0};
        std::array<std::size_t, 2> messages{1, 1};
        long n = 0;
        std::size_t trials = 0;
        bool genie_csi = false;
        RateEstimate user1;      // m1_hat != m1
        RateEstimate user2;      // m2_hat != m2
        RateEstimate both;       // both wrong
        RateEstimate any;        // at least one wrong
        std::array<std::size_t, 4> events{}; // indexed by ErrorEvent
    };

    // Full pipeline per trial: layout -> fading -> pilot and data outputs ->
    // LMMSE estimates -> exhaustive decoding of the pair (0, 0). Each trial draws
    // fresh codebooks, fading and noise from streams keyed by (seed, trial).
    // Under TDMA each user is decoded on its own segment; a user without data
    // slots but with more than one message counts as an error.
    ErrorReport run_mc_experiment(const ExperimentSettings &settings, const Exec &exec = {});

    nlohmann::json to_json(const ErrorReport &report);
}

#endif
