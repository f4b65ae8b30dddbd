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

#include "pilotmac/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pilotmac/decoder.hpp"
#include "pilotmac/errors.hpp"
#include "pilotmac/estimator.hpp"
#include "pilotmac/gmi.hpp"
#include "pilotmac/random.hpp"
#include "pilotmac/region.hpp"

#ifndef PILOTMAC_VERSION
#define PILOTMAC_VERSION "dev"
#endif

namespace pmac
{
    namespace
    {
        using nlohmann::json;
        namespace fs = std::filesystem;

        [[noreturn]] void bad_key(const std::string &key, const std::string &expect)
        {
            throw ConfigError("config key '" + key + "' must be " + expect);
        }

        double as_number(const json &v, const std::string &key)
        {
            if (!v.is_number())
                bad_key(key, "a number");
            return v.get<double>();
        }

        long as_integer(const json &v, const std::string &key)
        {
            if (!v.is_number_integer())
                bad_key(key, "an integer");
            return v.get<long>();
        }

        std::string hex64(std::uint64_t v)
        {
            std::ostringstream s;
            s << std::hex << std::setw(16) << std::setfill('0') << v;
            return s.str();
        }

        struct Context
        {
            const RunConfig &config;
            std::string command;
            std::uint64_t seed;
            fs::path out_dir;
            Exec exec;
            std::ostream &out;

            std::string provenance_line() const
            {
                return "# pilotmac " + std::string(PILOTMAC_VERSION) + " command=" + command + " config=" +
                       hex64(config.hash()) + " seed=" + std::to_string(seed);
            }

            json provenance() const
            {
                return {{"tool", "pilotmac"}, {"version", PILOTMAC_VERSION}, {"command", command},
                        {"config_hash", hex64(config.hash())}, {"seed", seed}};
            }

            std::ofstream open(const std::string &name) const
            {
                std::error_code ec;
                fs::create_directories(out_dir, ec);
                if (ec)
                    throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());
                std::ofstream f(out_dir / name, std::ios::binary);
                if (!f)
                    throw ConfigError("cannot write " + (out_dir / name).string());
                return f;
            }

            void write_json(const std::string &name, json doc) const
            {
                doc["provenance"] = provenance();
                std::ofstream f = open(name);
                f << doc.dump(2) << '\n';
                out << "wrote " << (out_dir / name).string() << '\n';
            }
        };

        // ---------------------------------------------------------------- prelog

        void cmd_prelog(const Context &ctx)
        {
            const Antennas ant = ctx.config.antennas();
            const PowerSpectralDensity psd = ctx.config.psd();
            const int ls = lstar(psd.lambda_d());

            const auto emit = [&](const std::string &name, const PreLogRegion &region) {
                std::ofstream f = ctx.open(name);
                f << ctx.provenance_line() << '\n';
                write_region_csv(f, region_corners(region));
                ctx.out << "wrote " << (ctx.out_dir / name).string() << '\n';
            };
            const PreLogRegion joint = joint_region(ant.n_t1, ant.n_t2, ant.n_r, ls);
            const PreLogRegion tdma = tdma_region(ant.n_t1, ant.n_t2, ant.n_r, ls);
            const PreLogRegion coherent = coherent_tdma_region(ant.n_t1, ant.n_t2, ant.n_r);
            emit("region_joint.csv", joint);
            emit("region_tdma.csv", tdma);
            emit("region_coherent_tdma.csv", coherent);
            emit("region_genie.csv", genie_region(ant.n_t1, ant.n_t2, ant.n_r));

            const Comparison cmp = compare_schemes(ant.n_t1, ant.n_t2, ant.n_r, ls);
            json report = to_json(cmp);
            report["lambda_d"] = psd.lambda_d();
            report["joint_region"] = {{"empty", joint.empty},
                                      {"cap_user1", to_string(joint.a1)},
                                      {"cap_user2", to_string(joint.a2)},
                                      {"cap_sum", to_string(joint.c)}};
            report["tdma_region"] = {{"cap_user1", to_string(tdma.a1)}, {"cap_user2", to_string(tdma.a2)}};
            if (ant.n_r == 1 && ant.n_t1 == 1 && ant.n_t2 == 1)
            {
                const SisoCheck s = siso_capacity_check(psd);
                report["siso"] = {{"tdma_sum", to_string(s.tdma_sum)},
                                  {"capacity_prelog", s.capacity_prelog},
                                  {"equal", s.equal}};
            }
            ctx.write_json("comparison.json", report);
            ctx.out << "L*=" << ls << " joint_sum=" << to_string(cmp.joint_sum) << " tdma_sum=" << to_string(cmp.tdma_sum)
                    << " coherent_tdma_sum=" << to_string(cmp.coherent_sum) << " class=" << to_string(cmp.cls)
                    << (joint.empty ? " (joint region empty: L* < n_t1 + n_t2)" : "") << '\n';
        }

        // ---------------------------------------------------------------- interp

        int data_block(const Antennas &ant, int period)
        {
            const int block = period - ant.total_tx();
            if (block < 1)
                throw PeriodTooShort("pilot period L leaves no room for data (need L > n_t1 + n_t2)");
            return block;
        }

        void cmd_interp(const Context &ctx)
        {
            const Antennas ant = ctx.config.antennas();
            const PowerSpectralDensity psd = ctx.config.psd();
            const int period = ctx.config.pilot_period();
            const std::vector<int> windows = ctx.config.windows();
            const std::vector<double> snrs = ctx.config.snr_db();
            const std::size_t trials = ctx.config.budget("interp_trials", 10000);
            const int block = data_block(ant, period);

            std::ofstream f = ctx.open("interp.csv");
            f << ctx.provenance_line() << '\n';
            f << "phase_ell,analytic_mse,empirical_mse,stderr,window,snr_db,user,antenna,pilot_offset,asymptotic_mse,eps2,eps2_T\n";
            f.precision(17);
            for (std::size_t w = 0; w < windows.size(); ++w)
                for (std::size_t j = 0; j < snrs.size(); ++j)
                {
                    const double snr = std::pow(10.0, snrs[j] / 10.0);
                    const Layout layout = build_joint_layout(ant, period, windows[w], block);
                    const ErrorStats stats = analytic_error_stats(psd, layout, snr);
                    const EmpiricalProfile prof =
                        empirical_mse(psd, layout, snr, trials, derive_key(ctx.seed, {w, j}), ctx.exec);
                    for (const EmpiricalPhase &p : prof.phases)
                    {
                        const PhaseError &e = p.reference;
                        f << e.slot_phase << ',' << e.analytic << ',' << p.mse.mean << ',' << p.mse.std_error << ','
                          << windows[w] << ',' << snrs[j] << ',' << e.user << ',' << e.antenna << ',' << e.pilot_offset
                          << ',' << e.asymptotic << ',' << stats.eps2 << ',' << stats.eps2_T << '\n';
                    }
                    ctx.out << "T=" << windows[w] << " snr_db=" << snrs[j] << " eps2_T=" << stats.eps2_T
                            << " eps2=" << stats.eps2 << " max_empirical=" << prof.max_empirical() << '\n';
                }
            ctx.out << "wrote " << (ctx.out_dir / "interp.csv").string() << '\n';
        }

        // ---------------------------------------------------------------- gmi

        void cmd_gmi(const Context &ctx)
        {
            SystemConfig sys;
            sys.antennas = ctx.config.antennas();
            sys.psd = ctx.config.psd();
            sys.pilot_period = ctx.config.pilot_period();
            const std::vector<double> snrs = ctx.config.snr_db();
            data_block(sys.antennas, sys.pilot_period);
            GmiOptions opts;
            opts.samples = ctx.config.budget("gmi_samples", 20000);

            json slopes = json::array();
            const Antennas &a = sys.antennas;
            const double frac = 1.0 - static_cast<double>(a.total_tx()) / sys.pilot_period;
            const std::array<double, 3> targets{std::min(a.n_r, a.n_t1) * frac, std::min(a.n_r, a.n_t2) * frac,
                                                std::min(a.n_r, a.total_tx()) * frac};
            for (int window : ctx.config.windows())
            {
                sys.window = window;
                opts.seed = derive_key(ctx.seed, {static_cast<std::uint64_t>(window)});
                const std::vector<GmiPoint> curve = gmi_curve(sys, snrs, opts, ctx.exec);
                const std::string name = "gmi_T" + std::to_string(window) + ".csv";
                std::ofstream f = ctx.open(name);
                f << ctx.provenance_line() << '\n';
                write_gmi_csv(f, curve);
                ctx.out << "wrote " << (ctx.out_dir / name).string() << '\n';

                json entry{{"window", window}};
                for (std::size_t b = 0; b < 3; ++b)
                {
                    const char *label = to_string(static_cast<Bound>(b));
                    json s{{"target", targets[b]}, {"finite", nullptr}, {"asymptotic", nullptr}, {"loosened", nullptr}};
                    if (curve.size() >= 2)
                    {
                        std::vector<std::pair<double, double>> fin, asy, loose;
                        for (const GmiPoint &p : curve)
                        {
                            const double snr = std::pow(10.0, p.snr_db / 10.0);
                            fin.emplace_back(snr, p.finite[b].value);
                            if (p.asymptotic)
                            {
                                asy.emplace_back(snr, (*p.asymptotic)[b].value);
                                loose.emplace_back(snr, (*p.loosened)[b].value);
                            }
                        }
                        s["finite"] = prelog_slope(fin);
                        if (!asy.empty())
                        {
                            s["asymptotic"] = prelog_slope(asy);
                            s["loosened"] = prelog_slope(loose);
                        }
                    }
                    entry[label] = s;
                    ctx.out << "T=" << window << ' ' << label << " slope(asymptotic)=" << s["asymptotic"].dump()
                            << " slope(finite)=" << s["finite"].dump() << " target=" << targets[b] << '\n';
                }
                slopes.push_back(entry);
            }
            ctx.write_json("gmi_slopes.json", {{"slopes", slopes}, {"snr_db", snrs}, {"samples", opts.samples}});
        }

        // ---------------------------------------------------------------- decode

        void cmd_decode(const Context &ctx)
        {
            ExperimentSettings s;
            s.system.antennas = ctx.config.antennas();
            s.system.psd = ctx.config.psd();
            s.system.pilot_period = ctx.config.pilot_period();
            const std::vector<int> windows = ctx.config.windows();
            s.system.window = windows.front();
            s.n = ctx.config.codeword_length();
            s.rates = ctx.config.rates();
            s.genie_csi = ctx.config.genie_csi();
            s.trials = ctx.config.budget("decode_trials", 200);
            s.scheme.kind = ctx.config.scheme();
            const std::vector<double> betas =
                s.scheme.kind == SchemeKind::Tdma ? ctx.config.betas() : std::vector<double>{1.0};

            json reports = json::array();
            const std::vector<double> snrs = ctx.config.snr_db();
            for (std::size_t j = 0; j < snrs.size(); ++j)
                for (std::size_t b = 0; b < betas.size(); ++b)
                {
                    s.system.snr = std::pow(10.0, snrs[j] / 10.0);
                    s.scheme.beta = betas[b];
                    s.seed = derive_key(ctx.seed, {j, b});
                    const ErrorReport rep = run_mc_experiment(s, ctx.exec);
                    json r = to_json(rep);
                    r["snr_db"] = snrs[j];
                    r["window"] = s.system.window;
                    r["period"] = s.system.pilot_period;
                    reports.push_back(r);
                    ctx.out << "snr_db=" << snrs[j] << " scheme=" << r["scheme"].get<std::string>() << " beta=" << rep.beta
                            << " p_err_user1=" << rep.user1.p << " p_err_user2=" << rep.user2.p << " p_err_both=" << rep.both.p
                            << '\n';
                }
            ctx.write_json("decode.json", {{"reports", reports}});
        }

        // ---------------------------------------------------------------- layout-dump

        void cmd_layout(const Context &ctx)
        {
            const Antennas ant = ctx.config.antennas();
            const int period = ctx.config.pilot_period();
            const int window = ctx.config.windows().front();
            const long n = ctx.config.codeword_length();
            const SchemeKind kind = ctx.config.scheme();
            const Layout layout = kind == SchemeKind::Joint ? build_joint_layout(ant, period, window, n)
                                                            : build_tdma_layout(ant, period, window, n, ctx.config.betas().front());
            const auto counts = [](const LayoutCounts &c) {
                return json{{"n", c.n}, {"n_p", c.n_p}, {"n_g", c.n_g}, {"n_prime", c.n_prime}};
            };
            ctx.write_json("layout.json", {{"scheme", kind == SchemeKind::Joint ? "joint" : "tdma"},
                                           {"beta", layout.beta},
                                           {"period", period},
                                           {"window", window},
                                           {"length", layout.length()},
                                           {"counts", {{"user1", counts(layout.counts[0])},
                                                       {"user2", counts(layout.counts[1])},
                                                       {"total", counts(layout.total)}}},
                                           {"slots", layout_to_json(layout)}});
        }
    }

    std::uint64_t fnv1a64(const std::string &bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    RunConfig::RunConfig(nlohmann::json doc, std::filesystem::path base_dir)
        : doc_(std::move(doc)), base_dir_(std::move(base_dir))
    {
        if (!doc_.is_object())
            throw ConfigError("config must be a JSON object");
        const json &schema = require("schema");
        if (!schema.is_string() || schema.get<std::string>() != config_schema)
            bad_key("schema", std::string("\"") + config_schema + "\"");
    }

    RunConfig RunConfig::load(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file " + path.string());
        json doc;
        try
        {
            doc = json::parse(in);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
        }
        return RunConfig(std::move(doc), path.parent_path());
    }

    const json *RunConfig::find(const std::string &dotted) const
    {
        const json *node = &doc_;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t dot = dotted.find('.', start);
            const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!node->is_object())
                return nullptr;
            const auto it = node->find(part);
            if (it == node->end())
                return nullptr;
            node = &*it;
            if (dot == std::string::npos)
                return node;
            start = dot + 1;
        }
    }

    const json &RunConfig::require(const std::string &dotted) const
    {
        const json *v = find(dotted);
        if (!v)
            throw ConfigError("missing config key '" + dotted + "'");
        return *v;
    }

    Antennas RunConfig::antennas() const
    {
        Antennas a;
        a.n_t1 = static_cast<int>(as_integer(require("antennas.n_t1"), "antennas.n_t1"));
        a.n_t2 = static_cast<int>(as_integer(require("antennas.n_t2"), "antennas.n_t2"));
        a.n_r = static_cast<int>(as_integer(require("antennas.n_r"), "antennas.n_r"));
        a.validate();
        return a;
    }

    PowerSpectralDensity RunConfig::psd() const
    {
        const json &shape = require("psd.shape");
        if (!shape.is_string())
            bad_key("psd.shape", "\"brickwall\" or \"tabulated\"");
        const std::string s = shape.get<std::string>();
        if (s == "brickwall")
        {
            if (find("psd.lambda_d"))
                return PowerSpectralDensity::brickwall(as_number(require("psd.lambda_d"), "psd.lambda_d"));
            // convenience: the bandwidth that makes 1/(2 lambda_d) = L*
            const long ls = as_integer(require("psd.l_star"), "psd.l_star");
            if (ls < 2)
                bad_key("psd.l_star", "an integer >= 2");
            return PowerSpectralDensity::brickwall(0.5 / static_cast<double>(ls));
        }
        if (s == "tabulated")
        {
            const json &file = require("psd.file");
            if (!file.is_string())
                bad_key("psd.file", "a path");
            fs::path p = file.get<std::string>();
            if (p.is_relative())
                p = base_dir_ / p;
            return load_psd_file(p);
        }
        bad_key("psd.shape", "\"brickwall\" or \"tabulated\"");
    }

    std::vector<double> RunConfig::snr_db() const
    {
        const json &v = require("snr_db");
        std::vector<double> out;
        if (v.is_number())
            out.push_back(v.get<double>());
        else if (v.is_array())
            for (const json &x : v)
            {
                if (!x.is_number())
                    bad_key("snr_db", "a list of finite numbers (dB)");
                out.push_back(x.get<double>());
            }
        else
            bad_key("snr_db", "a list of finite numbers (dB)");
        if (out.empty())
            bad_key("snr_db", "a non-empty list");
        for (double x : out)
            if (!std::isfinite(x))
                bad_key("snr_db", "a list of finite numbers (dB)");
        return out;
    }

    int RunConfig::pilot_period() const
    {
        const long L = as_integer(require("L"), "L");
        if (L < 1 || L > 1000000)
            bad_key("L", "an integer in [1, 1e6]");
        return static_cast<int>(L);
    }

    std::vector<int> RunConfig::windows() const
    {
        const json &v = require("T");
        std::vector<int> out;
        if (v.is_array())
            for (const json &x : v)
                out.push_back(static_cast<int>(as_integer(x, "T")));
        else
            out.push_back(static_cast<int>(as_integer(v, "T")));
        if (out.empty())
            bad_key("T", "a positive integer or a non-empty list");
        for (int t : out)
            if (t < 1 || t > 100000)
                bad_key("T", "positive integers");
        return out;
    }

    long RunConfig::codeword_length() const
    {
        const long n = as_integer(require("n"), "n");
        if (n < 0)
            bad_key("n", "a non-negative integer");
        return n;
    }

    std::vector<double> RunConfig::betas() const
    {
        const json *v = find("beta");
        std::vector<double> out;
        if (!v)
            return {0.5};
        if (v->is_array())
            for (const json &x : *v)
                out.push_back(as_number(x, "beta"));
        else
            out.push_back(as_number(*v, "beta"));
        if (out.empty())
            bad_key("beta", "a number or a non-empty list");
        for (double b : out)
            if (!(b >= 0.0 && b <= 1.0))
                bad_key("beta", "values in [0, 1]");
        return out;
    }

    SchemeKind RunConfig::scheme() const
    {
        const json *v = find("scheme");
        if (!v)
            return SchemeKind::Joint;
        if (v->is_string() && v->get<std::string>() == "joint")
            return SchemeKind::Joint;
        if (v->is_string() && v->get<std::string>() == "tdma")
            return SchemeKind::Tdma;
        bad_key("scheme", "\"joint\" or \"tdma\"");
    }

    std::uint64_t RunConfig::seed() const
    {
        const json *v = find("seed");
        if (!v)
            return 0;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            bad_key("seed", "a non-negative integer");
        return v->get<std::uint64_t>();
    }

    std::array<double, 2> RunConfig::rates() const
    {
        const json &v = require("decode.rates");
        if (!v.is_array() || v.size() != 2)
            bad_key("decode.rates", "a list of two rates in nats per channel use");
        return {as_number(v[0], "decode.rates"), as_number(v[1], "decode.rates")};
    }

    bool RunConfig::genie_csi() const
    {
        const json *v = find("decode.genie_csi");
        if (!v)
            return false;
        if (!v->is_boolean())
            bad_key("decode.genie_csi", "a boolean");
        return v->get<bool>();
    }

    std::size_t RunConfig::budget(const std::string &name, std::size_t fallback) const
    {
        const std::string key = "mc." + name;
        const json *v = find(key);
        if (!v)
            return fallback;
        const long b = as_integer(*v, key);
        if (b < 1)
            bad_key(key, "a positive integer");
        return static_cast<std::size_t>(b);
    }

    std::optional<std::string> RunConfig::output_dir() const
    {
        const json *v = find("output_dir");
        if (!v)
            return std::nullopt;
        if (!v->is_string())
            bad_key("output_dir", "a path");
        return v->get<std::string>();
    }

    std::uint64_t RunConfig::hash() const { return fnv1a64(doc_.dump()); }

    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"pilotmac: pilot-assisted nearest-neighbour decoding over fading MIMO MACs"};
        app.set_version_flag("--version", PILOTMAC_VERSION);
        app.require_subcommand(1);

        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::string out_dir;
        int workers = 0;
        app.add_option("--config", config_path, "run configuration (JSON)")->required();
        app.add_option("--seed", seed, "master seed; overrides the config");
        app.add_option("--out", out_dir, "output directory; overrides the config");
        app.add_option("--workers", workers, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

        struct Sub
        {
            const char *name;
            const char *help;
            void (*run)(const Context &);
        };
        const Sub subs[] = {
            {"prelog", "pre-log regions and the joint-vs-TDMA comparison", cmd_prelog},
            {"interp", "interpolation-error profiles (analytic and Monte Carlo)", cmd_interp},
            {"gmi", "GMI lower bounds over an SNR grid and fitted pre-log slopes", cmd_gmi},
            {"decode", "Monte Carlo message-error rates of the full pipeline", cmd_decode},
            {"layout-dump", "slot-by-slot transmission layout", cmd_layout},
        };
        for (const Sub &s : subs)
            app.add_subcommand(s.name, s.help)->fallthrough();

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }

        try
        {
            const RunConfig config = RunConfig::load(config_path);
            for (const Sub &s : subs)
            {
                if (!app.got_subcommand(s.name))
                    continue;
                fs::path dir = out_dir;
                if (dir.empty())
                    dir = config.output_dir().value_or(".");
                const Context ctx{config, s.name, seed ? *seed : config.seed(), dir,
                                  Exec::omp(workers), out};
                s.run(ctx);
            }
            return 0;
        }
        catch (const ConfigError &e)
        {
            err << "config error: " << e.what() << '\n';
            return 2;
        }
        catch (const NumericalError &e)
        {
            err << "numerical error: " << e.what() << '\n';
            return 3;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 3;
        }
    }
}
