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

#include "pilotmac/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pilotmac/errors.hpp"

namespace pmac
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        // Absolute error budget for every spectral integral.
        constexpr double quad_abs_tol = 1e-10;

        // Integrates fn over consecutive pieces [cuts[i], cuts[i+1]] with a 31-point
        // Gauss-Kronrod rule refined adaptively. Each piece is smooth by construction.
        template <class Fn>
        double integrate_pieces(Fn &&fn, const std::vector<double> &cuts)
        {
            double total = 0.0;
            double total_error = 0.0;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            {
                if (cuts[i + 1] - cuts[i] <= 0.0)
                    continue;
                double error = 0.0;
                total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                    fn, cuts[i], cuts[i + 1], 15, 1e-11, &error);
                total_error += error;
            }
            if (!(total_error <= quad_abs_tol) || !std::isfinite(total))
            {
                std::ostringstream msg;
                msg << "spectral quadrature did not converge (error estimate " << total_error << ")";
                throw NumericalError(msg.str());
            }
            return total;
        }

        double wrap_half(double lambda)
        {
            return lambda - std::floor(lambda + 0.5);
        }

        // Integral over one grid segment [x0, x0 + h] of the linear function
        // f0 + (f1 - f0)(x - x0)/h times exp(i w x).
        std::complex<double> linear_segment_moment(double x0, double h, double f0, double f1, double w)
        {
            const double theta = w * h;
            const double slope = f1 - f0;
            std::complex<double> base, ramp; // integrals of exp(i theta u) and u exp(i theta u) over u in [0,1]
            if (std::abs(theta) < 1e-4)
            {
                const std::complex<double> it(0.0, theta);
                base = 1.0 + it / 2.0 + it * it / 6.0 + it * it * it / 24.0;
                ramp = 0.5 + it / 3.0 + it * it / 8.0 + it * it * it / 30.0;
            }
            else
            {
                const std::complex<double> e = std::polar(1.0, theta);
                const std::complex<double> it(0.0, theta);
                base = (e - 1.0) / it;
                ramp = e / it - (e - 1.0) / (it * it);
            }
            return std::polar(h, w * x0) * (f0 * base + slope * ramp);
        }
    }

    PowerSpectralDensity PowerSpectralDensity::brickwall(double lambda_d)
    {
        if (!(lambda_d > 0.0 && lambda_d < 0.5))
            throw ConfigError("brickwall bandwidth must satisfy 0 < lambda_d < 1/2");
        PowerSpectralDensity psd;
        psd.shape_ = PsdShape::Brickwall;
        psd.lambda_d_ = lambda_d;
        return psd;
    }

    PowerSpectralDensity PowerSpectralDensity::tabulated(std::vector<double> grid_values)
    {
        const std::size_t m = grid_values.size();
        if (m < 5)
            throw ConfigError("tabulated PSD needs at least 5 grid points");
        for (double v : grid_values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("tabulated PSD values must be finite and non-negative");

        const auto positive = [](double v) { return v > 0.0; };
        const auto first_pos = std::find_if(grid_values.begin(), grid_values.end(), positive);
        if (first_pos == grid_values.end())
            throw ConfigError("tabulated PSD is identically zero");
        const auto last_pos = std::find_if(grid_values.rbegin(), grid_values.rend(), positive);
        const std::size_t p = static_cast<std::size_t>(first_pos - grid_values.begin());
        const std::size_t q = m - 1 - static_cast<std::size_t>(last_pos - grid_values.rbegin());
        if (p == 0 || q == m - 1)
            throw ConfigError("tabulated PSD must vanish at the grid ends (lambda_d < 1/2)");
        for (std::size_t i = p; i <= q; ++i)
            if (grid_values[i] <= 0.0)
                throw ConfigError("tabulated PSD has a zero inside its band");

        PowerSpectralDensity psd;
        psd.shape_ = PsdShape::Tabulated;
        psd.step_ = 1.0 / static_cast<double>(m - 1);
        psd.first_ = p - 1;
        psd.last_ = q + 1;
        const double lo = -0.5 + static_cast<double>(psd.first_) * psd.step_;
        const double hi = -0.5 + static_cast<double>(psd.last_) * psd.step_;
        if (std::abs(lo + hi) > 1e-9)
            throw ConfigError("tabulated PSD support must be symmetric about zero");
        psd.lambda_d_ = hi;

        // Piecewise-linear integral; the band is bounded by zero nodes.
        double power = 0.0;
        for (std::size_t i = p; i <= q; ++i)
            power += grid_values[i];
        power *= psd.step_;
        for (double &v : grid_values)
            v /= power;
        psd.values_ = std::move(grid_values);
        return psd;
    }

    double PowerSpectralDensity::operator()(double lambda) const
    {
        if (shape_ == PsdShape::Brickwall)
            return std::abs(lambda) <= lambda_d_ ? 0.5 / lambda_d_ : 0.0;

        if (lambda <= -lambda_d_ || lambda >= lambda_d_)
            return 0.0;
        const double x = (lambda + 0.5) / step_;
        const auto i = std::min(static_cast<std::size_t>(x), values_.size() - 2);
        const double frac = x - static_cast<double>(i);
        return values_[i] + frac * (values_[i + 1] - values_[i]);
    }

    double PowerSpectralDensity::periodic(double lambda) const
    {
        return (*this)(wrap_half(lambda));
    }

    double PowerSpectralDensity::midpoint(double lambda) const
    {
        const double x = wrap_half(lambda);
        if (shape_ == PsdShape::Brickwall && std::abs(std::abs(x) - lambda_d_) <= 1e-12 * lambda_d_)
            return 0.25 / lambda_d_;
        return (*this)(x);
    }

    std::vector<double> PowerSpectralDensity::breakpoints() const
    {
        if (shape_ == PsdShape::Brickwall)
            return {-lambda_d_, lambda_d_};
        std::vector<double> pts;
        pts.reserve(last_ - first_ + 1);
        for (std::size_t i = first_; i <= last_; ++i)
            pts.push_back(-0.5 + static_cast<double>(i) * step_);
        pts.front() = -lambda_d_;
        pts.back() = lambda_d_;
        return pts;
    }

    double PowerSpectralDensity::support_measure() const
    {
        return 2.0 * lambda_d_;
    }

    PowerSpectralDensity read_psd(std::istream &in)
    {
        std::string line;
        bool header = false;
        while (std::getline(in, line))
        {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            header = line.rfind("# psd v1", 0) == 0;
            break;
        }
        if (!header)
            throw ConfigError("PSD file must start with '# psd v1'");

        std::vector<double> lambdas, values;
        while (std::getline(in, line))
        {
            if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#')
                continue;
            std::istringstream row(line);
            double lambda = 0.0, value = 0.0;
            if (!(row >> lambda >> value))
                throw ConfigError("malformed PSD row: '" + line + "'");
            lambdas.push_back(lambda);
            values.push_back(value);
        }
        if (lambdas.size() < 5)
            throw ConfigError("PSD file needs at least 5 grid points");

        const double step = 1.0 / static_cast<double>(lambdas.size() - 1);
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            if (std::abs(lambdas[i] - (-0.5 + static_cast<double>(i) * step)) > 1e-9)
                throw ConfigError("PSD grid must be uniform over [-1/2, 1/2] including both endpoints");
        return PowerSpectralDensity::tabulated(std::move(values));
    }

    PowerSpectralDensity load_psd_file(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open PSD file '" + path.string() + "'");
        return read_psd(in);
    }

    void write_psd(std::ostream &out, const PowerSpectralDensity &psd)
    {
        out << "# psd v1\n" << std::setprecision(17);
        if (psd.shape() == PsdShape::Tabulated)
        {
            const auto values = psd.grid_values();
            for (std::size_t i = 0; i < values.size(); ++i)
                out << -0.5 + static_cast<double>(i) * psd.grid_step() << ' ' << values[i] << '\n';
            return;
        }
        // Brickwall: sample on a grid whose nodes straddle the band edges.
        const std::size_t m = 4097;
        const double step = 1.0 / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i)
        {
            const double lambda = -0.5 + static_cast<double>(i) * step;
            out << lambda << ' ' << psd(lambda) << '\n';
        }
    }

    std::complex<double> autocorrelation(const PowerSpectralDensity &psd, long m)
    {
        if (m == 0)
            return 1.0;
        const double w = two_pi * static_cast<double>(m);
        if (psd.shape() == PsdShape::Brickwall)
        {
            const double x = w * psd.lambda_d();
            return std::sin(x) / x;
        }

        const auto values = psd.grid_values();
        const double h = psd.grid_step();
        const auto pts = psd.breakpoints();
        std::complex<double> acc = 0.0;
        const std::size_t first = static_cast<std::size_t>(std::llround((pts.front() + 0.5) / h));
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            acc += linear_segment_moment(pts[i], h, values[first + i], values[first + i + 1], w);
        return acc;
    }

    std::complex<double> folded_spectrum(const PowerSpectralDensity &psd, int period, int ell, double lambda)
    {
        if (period < 1 || ell < 0 || ell >= period)
            throw ConfigError("folded spectrum needs period >= 1 and 0 <= ell < period");
        std::complex<double> acc = 0.0;
        for (int j = 0; j < period; ++j)
        {
            const double u = (lambda - j) / period;
            const double f = psd.periodic(u);
            if (f != 0.0)
                acc += f * std::polar(1.0, two_pi * ell * u);
        }
        return acc / static_cast<double>(period);
    }

    double interp_error_asymptotic(const PowerSpectralDensity &psd, int period, double snr, int ell)
    {
        if (!(snr >= 0.0))
            throw ConfigError("snr must be non-negative");
        if (period < 1)
            throw ConfigError("pilot period must be >= 1");
        ell = ((ell % period) + period) % period;
        if (snr == 0.0)
            return 1.0;

        // Cut [-1/2, 1/2] wherever some fold (lambda - j)/L crosses a spectral breakpoint.
        std::vector<double> cuts{-0.5, 0.5};
        for (int j = 0; j < period; ++j)
            for (double b : psd.breakpoints())
            {
                const long m_lo = static_cast<long>(std::ceil((-0.5 - j) / period - b));
                const long m_hi = static_cast<long>(std::floor((0.5 - j) / period - b));
                for (long m = m_lo; m <= m_hi; ++m)
                {
                    const double x = j + period * (b + static_cast<double>(m));
                    if (x > -0.5 && x < 0.5)
                        cuts.push_back(x);
                }
            }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        const auto integrand = [&](double lambda)
        {
            const double f0 = folded_spectrum(psd, period, 0, lambda).real();
            const double fl = std::norm(folded_spectrum(psd, period, ell, lambda));
            return snr * fl / (snr * f0 + 1.0);
        };
        return std::clamp(1.0 - integrate_pieces(integrand, cuts), 0.0, 1.0);
    }

    double interp_error_nyquist(const PowerSpectralDensity &psd, int period, double snr)
    {
        if (!(snr >= 0.0))
            throw ConfigError("snr must be non-negative");
        if (period < 1)
            throw ConfigError("pilot period must be >= 1");
        const int l_star = lstar(psd.lambda_d());
        if (period > l_star)
        {
            std::ostringstream msg;
            msg << "pilot period " << period << " exceeds the alias-free limit " << l_star;
            throw NyquistViolation(msg.str());
        }
        if (snr == 0.0)
            return 1.0;

        // 1 - int SNR f^2/(SNR f + L) written as int f L/(SNR f + L), using int f = 1;
        // this form keeps full relative precision when the error is tiny.
        const double ell = static_cast<double>(period);
        const auto integrand = [&](double lambda)
        {
            const double f = psd(lambda);
            return f * ell / (snr * f + ell);
        };
        return std::clamp(integrate_pieces(integrand, psd.breakpoints()), 0.0, 1.0);
    }

    int lstar(double lambda_d)
    {
        if (!(lambda_d > 0.0 && lambda_d < 0.5))
            throw ConfigError("lambda_d must satisfy 0 < lambda_d < 1/2");
        const double ratio = 0.5 / lambda_d;
        if (ratio > static_cast<double>(std::numeric_limits<int>::max()))
            throw ConfigError("lambda_d too small: alias-free period does not fit an int");
        const double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) <= 1e-9 * ratio)
            return static_cast<int>(nearest);
        return static_cast<int>(std::floor(ratio));
    }

    double doppler_lambda(double max_doppler_hz, double coherence_bandwidth_hz)
    {
        if (!(max_doppler_hz > 0.0) || !(coherence_bandwidth_hz > 0.0))
            throw ConfigError("Doppler shift and coherence bandwidth must be positive");
        const double lambda_d = max_doppler_hz / coherence_bandwidth_hz;
        if (!(lambda_d < 0.5))
            throw ConfigError("f_m / W_c >= 1/2 is outside the bandlimited fading model");
        return lambda_d;
    }
}
