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

#include "pilotmac/gmi.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "pilotmac/errors.hpp"
#include "pilotmac/random.hpp"
#include "pilotmac/scheme.hpp"
#include "pilotmac/stats.hpp"

namespace pmac
{
    namespace
    {
        constexpr std::uint64_t sample_tag = 0x474d49; // shared by all bounds: common random numbers

        struct Column
        {
            int user;
            int antenna;
            Eigen::Index index; // column of the stacked n_r x (n_t1 + n_t2) draw
        };

        std::vector<Column> columns_of(const Antennas &ant, Bound b)
        {
            std::vector<Column> cols;
            if (b != Bound::User2)
                for (int t = 1; t <= ant.n_t1; ++t)
                    cols.push_back({1, t, t - 1});
            if (b != Bound::User1)
                for (int t = 1; t <= ant.n_t2; ++t)
                    cols.push_back({2, t, ant.n_t1 + t - 1});
            return cols;
        }

        Eigen::MatrixXcd stacked_draw(const Antennas &ant, std::uint64_t seed, std::size_t i)
        {
            ComplexGaussian g(derive_key(seed, {sample_tag, i}));
            Eigen::MatrixXcd m(ant.n_r, ant.total_tx());
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    m(r, c) = g();
            return m;
        }

        // log det(I + c M M^H), through the smaller Gram matrix.
        double log_det_plus(const Eigen::MatrixXcd &m, double c)
        {
            const Eigen::MatrixXcd gram = m.rows() <= m.cols() ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
            Eigen::MatrixXcd a = c * gram;
            a.diagonal().array() += 1.0;
            const Eigen::LLT<Eigen::MatrixXcd> llt(a);
            if (llt.info() != Eigen::Success)
                throw NumericalError("log-det argument is not positive definite");
            return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
        }

        // log det of the smaller Gram matrix; -inf when singular.
        double log_det_gram(const Eigen::MatrixXcd &m)
        {
            const Eigen::MatrixXcd gram = m.rows() <= m.cols() ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
            double s = 0.0;
            for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
            {
                const double v = eig.eigenvalues()(i);
                if (!(v > 0.0))
                    return -std::numeric_limits<double>::infinity();
                s += std::log(v);
            }
            return s;
        }

        Eigen::MatrixXcd select(const Eigen::MatrixXcd &g, const std::vector<Column> &cols)
        {
            Eigen::MatrixXcd m(g.rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t j = 0; j < cols.size(); ++j)
                m.col(static_cast<Eigen::Index>(j)) = g.col(cols[j].index);
            return m;
        }

        double mse_of(const ErrorStats &stats, int user, int antenna, int phase)
        {
            for (const PhaseError &p : stats.phases)
                if (p.user == user && p.antenna == antenna && p.data_phase == phase)
                    return p.analytic;
            throw ConfigError("error statistics lack a data phase required by the bound");
        }

        // Per-phase column standard deviations sqrt(1 - mse).
        std::vector<Eigen::VectorXd> phase_scales(const ErrorStats &stats, const std::vector<Column> &cols)
        {
            int phases = -1;
            for (const Column &c : cols)
            {
                const int p = stats.data_phases(c.user);
                if (phases >= 0 && p != phases)
                    throw ConfigError("users have different data phases; the bound needs the joint layout");
                phases = p;
            }
            std::vector<Eigen::VectorXd> scales;
            for (int p = 1; p <= phases; ++p)
            {
                Eigen::VectorXd s(static_cast<Eigen::Index>(cols.size()));
                for (std::size_t j = 0; j < cols.size(); ++j)
                    s(static_cast<Eigen::Index>(j)) = std::sqrt(std::max(0.0, 1.0 - mse_of(stats, cols[j].user, cols[j].antenna, p)));
                scales.push_back(std::move(s));
            }
            return scales;
        }

        template <class Fn>
        McValue monte_carlo(const GmiOptions &opts, const Exec &exec, Fn &&per_sample)
        {
            if (opts.samples < 2)
                throw ConfigError("Monte Carlo needs at least 2 samples");
            std::vector<double> values(opts.samples);
            std::vector<unsigned char> clamped(opts.samples, 0);
            for_each_index(exec, opts.samples, [&](std::size_t i) {
                bool c = false;
                values[i] = per_sample(i, c);
                clamped[i] = c ? 1 : 0;
            });
            const MeanEstimate est = mean_estimate(values);
            McValue out{est.mean, est.std_error, est.count, 0.0};
            std::size_t nc = 0;
            for (unsigned char c : clamped)
                nc += c;
            out.clamp_rate = static_cast<double>(nc) / static_cast<double>(opts.samples);
            if (opts.max_std_error > 0.0 && out.std_error > opts.max_std_error)
                throw NumericalError("Monte Carlo standard error above the requested tolerance; raise the sample budget");
            return out;
        }

        double data_fraction(const SystemConfig &c)
        {
            return static_cast<double>(c.pilot_period - c.antennas.total_tx()) / c.pilot_period;
        }

        double denominator(const Antennas &ant, double snr, double eps2)
        {
            return ant.n_r + ant.n_r * ant.total_tx() * snr * eps2;
        }
    }

    const char *to_string(Bound b)
    {
        switch (b)
        {
        case Bound::User1:
            return "user1";
        case Bound::User2:
            return "user2";
        case Bound::Sum:
            return "sum";
        }
        return "unknown";
    }

    ErrorStats joint_error_stats(const SystemConfig &config)
    {
        config.validate();
        const long block = config.pilot_period - config.antennas.total_tx();
        const Layout layout = build_joint_layout(config.antennas, config.pilot_period, config.window, block);
        return analytic_error_stats(config.psd, layout, config.snr);
    }

    double f_snr(const SystemConfig &config, const ErrorStats &stats)
    {
        const Antennas &ant = config.antennas;
        double mse_sum = 0.0;
        for (int s = 1; s <= 2; ++s)
            for (int p = 1; p <= stats.data_phases(s); ++p)
                mse_sum += stats.antenna_sum(s, p);
        return ant.n_r * data_fraction(config) + config.snr * ant.n_r * mse_sum / config.pilot_period;
    }

    double theta_star(const Antennas &antennas, double snr, double eps2_T)
    {
        if (!(eps2_T >= 0.0 && eps2_T <= 1.0))
            throw ConfigError("eps2_T must lie in [0, 1]");
        if (!(snr >= 0.0))
            throw ConfigError("snr must be non-negative");
        return -1.0 / denominator(antennas, snr, eps2_T);
    }

    McValue gmi_lower_finite(const SystemConfig &config, const ErrorStats &stats, Bound bound,
                             const GmiOptions &opts, const Exec &exec)
    {
        config.validate();
        const Antennas &ant = config.antennas;
        const auto cols = columns_of(ant, bound);
        const auto scales = phase_scales(stats, cols);
        const double c = config.snr / denominator(ant, config.snr, stats.eps2_T);
        const double L = config.pilot_period;
        const double offset = data_fraction(config);
        return monte_carlo(opts, exec, [&](std::size_t i, bool &) {
            const Eigen::MatrixXcd g = select(stacked_draw(ant, opts.seed, i), cols);
            double s = 0.0;
            for (const Eigen::VectorXd &sc : scales)
                s += log_det_plus(g * sc.asDiagonal(), c);
            return s / L - offset;
        });
    }

    McValue gmi_lower_asymptotic(const SystemConfig &config, double eps2, Bound bound,
                                 const GmiOptions &opts, const Exec &exec)
    {
        config.validate();
        if (config.pilot_period > lstar(config.psd.lambda_d()))
            throw NyquistViolation("asymptotic bound needs L <= L*");
        if (!(eps2 >= 0.0 && eps2 <= 1.0))
            throw ConfigError("eps2 must lie in [0, 1]");
        const Antennas &ant = config.antennas;
        const auto cols = columns_of(ant, bound);
        const double c = config.snr * (1.0 - eps2) / denominator(ant, config.snr, eps2);
        const double frac = data_fraction(config);
        return monte_carlo(opts, exec, [&](std::size_t i, bool &) {
            const Eigen::MatrixXcd g = select(stacked_draw(ant, opts.seed, i), cols);
            return frac * (log_det_plus(g, c) - 1.0);
        });
    }

    McValue psi(const Antennas &antennas, Bound bound, double variance, const GmiOptions &opts, const Exec &exec)
    {
        antennas.validate();
        if (!(variance > 0.0))
            throw ConfigError("Psi needs a non-degenerate estimate law (variance > 0)");
        const auto cols = columns_of(antennas, bound);
        const double sd = std::sqrt(variance);
        return monte_carlo(opts, exec, [&](std::size_t i, bool &clamped) {
            const Eigen::MatrixXcd g = sd * select(stacked_draw(antennas, opts.seed, i), cols);
            double v = log_det_gram(g);
            if (v < log_det_floor)
            {
                v = log_det_floor;
                clamped = true;
            }
            return v - 1.0;
        });
    }

    McValue psi_bound(const SystemConfig &config, double eps2, Bound bound, const GmiOptions &opts, const Exec &exec)
    {
        config.validate();
        if (config.pilot_period > lstar(config.psd.lambda_d()))
            throw NyquistViolation("asymptotic bound needs L <= L*");
        if (!(config.snr > 0.0))
            throw ConfigError("the loosened bound needs snr > 0");
        const Antennas &ant = config.antennas;
        const int rank = std::min<int>(ant.n_r, static_cast<int>(columns_of(ant, bound).size()));
        McValue p = psi(ant, bound, 1.0 - eps2, opts, exec);
        const double frac = data_fraction(config);
        const double lead = rank * std::log(config.snr / denominator(ant, config.snr, eps2));
        p.value = frac * (lead + p.value);
        p.std_error *= frac;
        return p;
    }

    McValue gmi_objective(const SystemConfig &config, const ErrorStats &stats, Bound bound, double theta,
                          const GmiOptions &opts, const Exec &exec)
    {
        config.validate();
        if (!(theta <= 0.0))
            throw ConfigError("theta must be <= 0");
        const Antennas &ant = config.antennas;
        const auto cols = columns_of(ant, bound);
        const auto scales = phase_scales(stats, cols);
        const double lead = theta * f_snr(config, stats);
        const double c = -theta * config.snr;
        const double L = config.pilot_period;
        return monte_carlo(opts, exec, [&](std::size_t i, bool &) {
            const Eigen::MatrixXcd g = select(stacked_draw(ant, opts.seed, i), cols);
            double s = 0.0;
            for (const Eigen::VectorXd &sc : scales)
                s += log_det_plus(g * sc.asDiagonal(), c);
            return lead + s / L;
        });
    }

    ThetaRefinement refine_theta(const SystemConfig &config, const ErrorStats &stats, Bound bound,
                                 const GmiOptions &opts, const Exec &exec)
    {
        ThetaRefinement out;
        out.theta_star = theta_star(config.antennas, config.snr, stats.eps2_T);
        out.at_theta_star = gmi_objective(config, stats, bound, out.theta_star, opts, exec);
        const auto negated = [&](double th) { return -gmi_objective(config, stats, bound, th, opts, exec).value; };
        const auto [th, neg] = boost::math::tools::brent_find_minima(negated, 10.0 * out.theta_star, 0.0, 30);
        (void)neg;
        out.theta = th;
        out.value = gmi_objective(config, stats, bound, th, opts, exec);
        if (out.at_theta_star.value > out.value.value)
        {
            out.theta = out.theta_star;
            out.value = out.at_theta_star;
        }
        return out;
    }

    double prelog_slope(std::span<const std::pair<double, double>> points)
    {
        if (points.size() < 2)
            throw ConfigError("slope fit needs at least two points");
        double mx = 0.0, my = 0.0;
        for (const auto &[snr, g] : points)
        {
            if (!(snr > 0.0))
                throw ConfigError("slope fit needs positive SNR values");
            mx += std::log(snr);
            my += g;
        }
        mx /= static_cast<double>(points.size());
        my /= static_cast<double>(points.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto &[snr, g] : points)
        {
            const double dx = std::log(snr) - mx;
            sxx += dx * dx;
            sxy += dx * (g - my);
        }
        if (sxx <= 0.0)
            throw ConfigError("slope fit needs distinct SNR values");
        return sxy / sxx;
    }

    std::vector<GmiPoint> gmi_curve(const SystemConfig &config, std::span<const double> snr_db,
                                    const GmiOptions &opts, const Exec &exec)
    {
        if (snr_db.empty())
            throw ConfigError("SNR grid is empty");
        const bool alias_free = config.pilot_period <= lstar(config.psd.lambda_d());
        const std::array<Bound, 3> bounds{Bound::User1, Bound::User2, Bound::Sum};
        std::vector<GmiPoint> curve;
        for (std::size_t j = 0; j < snr_db.size(); ++j)
        {
            if (!std::isfinite(snr_db[j]))
                throw ConfigError("SNR values must be finite");
            SystemConfig c = config;
            c.snr = std::pow(10.0, snr_db[j] / 10.0);
            GmiOptions o = opts;
            o.seed = derive_key(opts.seed, {j});
            const ErrorStats stats = joint_error_stats(c);

            GmiPoint p;
            p.snr_db = snr_db[j];
            p.eps2 = stats.eps2;
            p.eps2_T = stats.eps2_T;
            p.theta = theta_star(c.antennas, c.snr, stats.eps2_T);
            for (std::size_t b = 0; b < 3; ++b)
                p.finite[b] = gmi_lower_finite(c, stats, bounds[b], o, exec);
            if (alias_free)
            {
                p.asymptotic.emplace();
                p.loosened.emplace();
                for (std::size_t b = 0; b < 3; ++b)
                {
                    (*p.asymptotic)[b] = gmi_lower_asymptotic(c, stats.eps2, bounds[b], o, exec);
                    (*p.loosened)[b] = psi_bound(c, stats.eps2, bounds[b], o, exec);
                }
            }
            curve.push_back(std::move(p));
        }
        return curve;
    }

    void write_gmi_csv(std::ostream &out, std::span<const GmiPoint> curve)
    {
        out << "snr_db,bound_user1,bound_user2,bound_sum,stderr_user1,stderr_user2,stderr_sum,theta_used,eps2,eps2_T,"
               "asym_user1,asym_user2,asym_sum,asym_stderr_user1,asym_stderr_user2,asym_stderr_sum,"
               "psi_user1,psi_user2,psi_sum,psi_stderr_user1,psi_stderr_user2,psi_stderr_sum,psi_clamp_rate\n";
        const auto old = out.precision(17);
        for (const GmiPoint &p : curve)
        {
            out << p.snr_db;
            for (const McValue &v : p.finite)
                out << ',' << v.value;
            for (const McValue &v : p.finite)
                out << ',' << v.std_error;
            out << ',' << p.theta << ',' << p.eps2 << ',' << p.eps2_T;
            for (const auto *set : {&p.asymptotic, &p.loosened})
            {
                for (int k = 0; k < 3; ++k)
                {
                    out << ',';
                    if (*set)
                        out << (**set)[static_cast<std::size_t>(k)].value;
                }
                for (int k = 0; k < 3; ++k)
                {
                    out << ',';
                    if (*set)
                        out << (**set)[static_cast<std::size_t>(k)].std_error;
                }
            }
            out << ',';
            if (p.loosened)
            {
                double rate = 0.0;
                for (const McValue &v : *p.loosened)
                    rate = std::max(rate, v.clamp_rate);
                out << rate;
            }
            out << '\n';
        }
        out.precision(old);
    }
}
