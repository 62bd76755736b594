// SPDX-License-Identifier: Apache-2.0
//
// mara-sim: channel modelling and spectral-efficiency optimization for
// movable and electromagnetically reconfigurable antenna arrays
// Copyright (C) 2026 The mara-sim authors
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

#include "cli.hpp"

#include "marasim/checks.hpp"
#include "marasim/harness.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace marasim::cli
{
    namespace
    {
        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> parts;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, sep))
                if (!item.empty())
                    parts.push_back(item);
            return parts;
        }

        std::uint64_t parse_u64(const std::string &s)
        {
            std::size_t pos = 0;
            unsigned long long v = 0;
            try
            {
                v = std::stoull(s, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size())
                throw ConfigError("cannot parse seed '" + s + "'");
            return v;
        }

        std::vector<std::uint64_t> parse_seeds(const std::string &text)
        {
            std::vector<std::uint64_t> seeds;
            for (const auto &part : split(text, ','))
            {
                const auto dash = part.find('-');
                if (dash != std::string::npos && dash > 0)
                {
                    const std::uint64_t a = parse_u64(part.substr(0, dash)), b = parse_u64(part.substr(dash + 1));
                    if (b < a)
                        throw ConfigError("bad seed range '" + part + "'");
                    for (std::uint64_t s = a; s <= b; ++s)
                        seeds.push_back(s);
                }
                else
                    seeds.push_back(parse_u64(part));
            }
            return seeds;
        }

        Sweep parse_sweep(const std::string &text)
        {
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError("sweep must look like name=v1,v2,...");
            Sweep sweep;
            sweep.name = text.substr(0, eq);
            for (const auto &v : split(text.substr(eq + 1), ','))
            {
                try
                {
                    sweep.values.push_back(std::stod(v));
                }
                catch (const std::exception &)
                {
                    throw ConfigError("sweep value '" + v + "' is not a number");
                }
            }
            return sweep;
        }

        // Applies --set overrides to whichever of config / options knows the key
        void apply_overrides(const std::vector<std::string> &overrides, SystemConfig &config, OptimOptions &opts)
        {
            const auto &ck = config_keys();
            const auto &ok = optim_option_keys();
            for (const auto &o : overrides)
            {
                const auto eq = o.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("override '" + o + "' must look like key=value");
                const std::string key = o.substr(0, eq), value = o.substr(eq + 1);
                if (std::find(ck.begin(), ck.end(), key) != ck.end())
                    apply_override(config, key, value);
                else if (std::find(ok.begin(), ok.end(), key) != ok.end())
                    apply_override(opts, key, value);
                else
                    throw ConfigError("unknown override key '" + key + "'");
            }
        }

        int thread_count()
        {
            if (const char *env = std::getenv("MARA_SIM_THREADS"))
            {
                const int n = std::atoi(env);
                if (n > 0)
                    return n;
            }
            return int(std::max(1u, std::thread::hardware_concurrency()));
        }

        void write_text(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out || !out.write(text.data(), std::streamsize(text.size())))
                throw FileError("cannot write '" + path.string() + "'");
        }

        nlohmann::json summary_json(const Summary &s)
        {
            nlohmann::json j;
            j["schemes"] = nlohmann::json::array();
            for (const auto &ss : s.schemes)
                j["schemes"].push_back(
                    {{"scheme", ss.scheme}, {"count", ss.count}, {"mean_se", ss.mean}, {"std_se", ss.std}, {"min_se", ss.min}});
            j["mara_tfa_ratio"] = s.mara_tfa_ratio ? nlohmann::json(*s.mara_tfa_ratio) : nlohmann::json(nullptr);
            j["notices"] = s.notices;
            return j;
        }
    }

    int cmd_run(const Invocation &inv, std::ostream &out, std::ostream &err)
    {
        try
        {
            ExperimentSpec spec;
            spec.base = inv.config_path.empty() ? SystemConfig{} : load_config(inv.config_path);
            apply_overrides(inv.overrides, spec.base, spec.optim);
            validate(spec.base);
            spec.schemes = spec.base.schemes;
            spec.seeds = inv.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : parse_seeds(inv.seeds);
            if (!inv.sweep.empty())
                spec.sweep = parse_sweep(inv.sweep);
            spec.threads = thread_count();
            spec.inject_nesting_fault = inv.inject_nesting_fault;
            validate(spec);

            const std::vector<ResultRow> rows = run_experiment(spec);

            std::filesystem::create_directories(inv.out_dir);
            emit_csv(rows, inv.out_dir / "results.csv", CsvOptions{inv.no_wall_time});
            const Summary summary = summarize(rows);
            write_text(inv.out_dir / "summary.csv", summary_csv(summary));
            if (inv.json_summary)
                write_text(inv.out_dir / "summary.json", summary_json(summary).dump(2) + "\n");

            if (!inv.quiet)
            {
                if (spec.sweep)
                    for (double v : spec.sweep->values)
                        out << spec.sweep->name << " = " << format_double(v) << '\n'
                            << format_summary(summarize(rows, v)) << '\n';
                out << "all cells\n" << format_summary(summary);
            }

            int code = exit_ok;
            for (const auto &r : rows)
            {
                if (r.status == RowStatus::Error)
                {
                    err << "error: seed " << r.seed << ", " << r.sweep_param << "=" << format_double(r.sweep_value)
                        << ": " << r.message << '\n';
                    code = std::max(code, exit_error);
                }
                else if (r.status == RowStatus::NestingViolation)
                {
                    err << "nesting violation: seed " << r.seed << ", " << r.sweep_param << "="
                        << format_double(r.sweep_value) << ": " << r.message << '\n';
                    code = exit_assertion;
                }
            }
            return code;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_error;
        }
    }

    int cmd_check(const Invocation &inv, std::ostream &out, std::ostream &err)
    {
        try
        {
            CheckOptions opts;
            opts.config.num_bs_antennas = 3;
            opts.config.num_ues = 2;
            opts.config.num_subcarriers = 3;
            opts.config.num_paths_per_ue = 4;
            if (!inv.config_path.empty())
                opts.config = load_config(inv.config_path);
            apply_overrides(inv.overrides, opts.config, opts.optim);
            validate(opts.config);
            validate(opts.optim);

            bool all = true;
            for (const auto &r : run_all_checks(opts))
            {
                all = all && r.passed;
                out << (r.passed ? "PASS " : "FAIL ") << r.name << "  (worst " << std::scientific << std::setprecision(3)
                    << r.worst << ", tolerance " << r.tolerance << ", " << r.cases << " cases)\n"
                    << std::defaultfloat;
            }
            return all ? exit_ok : exit_assertion;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_error;
        }
    }

    int cmd_oracle(const Invocation &inv, std::ostream &out, std::ostream &err)
    {
        try
        {
            SystemConfig unused;
            OptimOptions opts;
            apply_overrides(inv.overrides, unused, opts);
            validate(opts);

            // size guard before any work
            const long long per_ball =
                grid_points_per_ball(position_oracle_config(1), inv.grid_step_fraction * position_oracle_config(1).antenna_spacing());
            if (per_ball > BruteForceOptions{}.max_evaluations)
                throw SizeError("oracle grid of " + std::to_string(per_ball) + " points exceeds the brute-force limit");

            double worst_position = -std::numeric_limits<double>::infinity();
            double worst_pattern = 0.0;
            out << std::scientific << std::setprecision(3);
            for (int i = 0; i < inv.instances; ++i)
            {
                const OracleCase c = position_oracle_case(std::uint64_t(i + 1), inv.grid_step_fraction, opts);
                worst_position = std::max(worst_position, c.gap());
                if (!inv.quiet)
                    out << "positions seed " << i + 1 << ": optimizer " << c.optimized << ", grid " << c.reference
                        << ", gap " << c.gap() << '\n';
            }
            for (int i = 0; i < inv.instances; ++i)
            {
                const OracleCase c = pattern_oracle_case(std::uint64_t(i + 1), opts);
                worst_pattern = std::max(worst_pattern, std::abs(c.gap()));
                if (!inv.quiet)
                    out << "patterns  seed " << i + 1 << ": optimizer " << c.optimized << ", eigenvector " << c.reference
                        << ", gap " << c.gap() << '\n';
            }
            out << "max relative SE gap, positions vs grid: " << worst_position << '\n';
            out << "max relative SE gap, patterns vs eigenvector: " << worst_pattern << '\n' << std::defaultfloat;
            return (worst_position <= 1e-4 && worst_pattern <= 1e-6) ? exit_ok : exit_assertion;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_error;
        }
    }

    int main(int argc, char **argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"mara_sim: spectral-efficiency optimization for movable and reconfigurable antenna arrays"};
        app.require_subcommand(1);

        Invocation inv;
        auto add_common = [&](CLI::App *sub)
        {
            sub->add_option("--config", inv.config_path, "JSON configuration file");
            sub->add_option("--set", inv.overrides, "Override a configuration or optimizer key (key=value)")
                ->take_all()
                ->allow_extra_args(false);
            sub->add_flag("-q,--quiet", inv.quiet, "Suppress tables");
        };

        CLI::App *run = app.add_subcommand("run", "Run the multi-scheme experiment");
        add_common(run);
        run->add_option("--out", inv.out_dir, "Output directory");
        run->add_option("--seeds", inv.seeds, "Seeds, e.g. 1,2,3 or 1-20");
        run->add_option("--sweep", inv.sweep, "Sweep, e.g. total_power_w=0.1,1,10");
        run->add_flag("--json-summary", inv.json_summary, "Also write summary.json");
        run->add_flag("--no-wall-time", inv.no_wall_time, "Write 0 for wall_time_s (byte-stable CSV)");
        run->add_flag("--inject-nesting-fault", inv.inject_nesting_fault)->group("");

        CLI::App *check = app.add_subcommand("check", "Run the invariant suites");
        add_common(check);

        CLI::App *oracle = app.add_subcommand("oracle", "Compare optimizers against brute force");
        add_common(oracle);
        oracle->add_option("--grid-step", inv.grid_step_fraction, "Brute-force grid step as a fraction of d");
        oracle->add_option("--instances", inv.instances, "Instances per oracle kind");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_error;
        }

        if (run->parsed())
            return cmd_run(inv, out, err);
        if (check->parsed())
            return cmd_check(inv, out, err);
        return cmd_oracle(inv, out, err);
    }
}
