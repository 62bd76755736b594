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

#include "marasim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace marasim
{
    namespace
    {
        const std::vector<std::string> sweepable = {"total_power_w", "num_bs_antennas", "num_paths_per_ue",
                                                    "shod_max_degree"};

        void apply_sweep_value(SystemConfig &c, const std::string &name, double v)
        {
            if (name == "total_power_w")
                c.total_power = v;
            else if (name == "num_bs_antennas")
                c.num_bs_antennas = int(std::lround(v));
            else if (name == "num_paths_per_ue")
                c.num_paths_per_ue = int(std::lround(v));
            else if (name == "shod_max_degree")
                c.shod_max_degree = int(std::lround(v));
            else
                throw ValidationError("sweep", "parameter '" + name + "' cannot be swept");
        }

        struct Cell
        {
            std::uint64_t seed;
            double sweep_value;
        };

        std::vector<ResultRow> run_cell(const ExperimentSpec &spec, const Cell &cell)
        {
            const std::string sweep_name = spec.sweep ? spec.sweep->name : "none";
            auto make_row = [&](std::string scheme)
            {
                ResultRow row;
                row.seed = cell.seed;
                row.scheme = std::move(scheme);
                row.sweep_param = sweep_name;
                row.sweep_value = cell.sweep_value;
                return row;
            };

            std::vector<ResultRow> rows;
            try
            {
                SystemConfig config = spec.base;
                config.seed = cell.seed;
                config.schemes = spec.schemes;
                if (spec.sweep)
                    apply_sweep_value(config, spec.sweep->name, cell.sweep_value);
                validate(config);

                const Scenario scenario = generate_scenario(config);
                const BasisSet basis(config.shod_max_degree);
                const ChannelModel model(scenario, basis);
                OptimOptions opts = spec.optim;
                opts.seed = cell.seed;

                // Always solve the full chain so the nesting relations can be checked
                const std::vector<Scheme> all = {Scheme::TFA, Scheme::SMA, Scheme::ERA, Scheme::MARA};
                const std::vector<OptimResult> results = optimize_schemes(model, all, opts);
                std::map<Scheme, double> se;
                for (const auto &r : results)
                    se[r.scheme] = r.se();
                if (spec.inject_nesting_fault)
                    se[Scheme::MARA] = se[Scheme::ERA] - 1.0;

                for (Scheme s : spec.schemes)
                {
                    const OptimResult &r = results[std::size_t(s)];
                    ResultRow row = make_row(std::string(to_string(s)));
                    row.se_sum = se[s];
                    row.se_per_subcarrier = row.se_sum / double(config.num_subcarriers);
                    row.iterations = r.iterations;
                    row.wall_time = r.wall_time;
                    row.se_trace = r.se_trace;
                    for (std::size_t i = 1; i < r.se_trace.size(); ++i)
                        if (r.se_trace[i] < r.se_trace[i - 1] - 1e-9)
                            row.trace_monotone = false;
                    rows.push_back(std::move(row));
                }

                const std::pair<Scheme, Scheme> relations[] = {{Scheme::SMA, Scheme::TFA},
                                                               {Scheme::ERA, Scheme::TFA},
                                                               {Scheme::MARA, Scheme::SMA},
                                                               {Scheme::MARA, Scheme::ERA}};
                for (const auto &[hi, lo] : relations)
                {
                    const double gap = se[hi] - se[lo];
                    if (gap < -1e-9)
                    {
                        ResultRow row = make_row("NESTING:" + std::string(to_string(hi)) + "<" + std::string(to_string(lo)));
                        row.status = RowStatus::NestingViolation;
                        row.se_sum = gap;
                        row.se_per_subcarrier = gap / double(config.num_subcarriers);
                        row.message = std::string(to_string(hi)) + " fell short of " + std::string(to_string(lo)) + " by " +
                                      format_double(-gap);
                        rows.push_back(std::move(row));
                    }
                }
                for (const auto &row : rows)
                    if (!row.trace_monotone)
                    {
                        ResultRow diag = make_row("TRACE:" + row.scheme);
                        diag.status = RowStatus::NestingViolation;
                        diag.message = "se_trace of " + row.scheme + " decreased";
                        rows.push_back(std::move(diag));
                        break;
                    }
            }
            catch (const std::exception &e)
            {
                rows.clear();
                ResultRow row = make_row("ERROR");
                row.status = RowStatus::Error;
                row.se_sum = std::nan("");
                row.se_per_subcarrier = std::nan("");
                row.message = e.what();
                rows.push_back(std::move(row));
            }
            return rows;
        }
    }

    void validate(const ExperimentSpec &spec)
    {
        validate(spec.base);
        validate(spec.optim);
        if (spec.seeds.empty())
            throw ValidationError("seeds", "at least one seed required");
        if (spec.schemes.empty())
            throw ValidationError("schemes", "at least one scheme required");
        if (spec.sweep)
        {
            if (std::find(sweepable.begin(), sweepable.end(), spec.sweep->name) == sweepable.end())
                throw ValidationError("sweep", "parameter '" + spec.sweep->name + "' cannot be swept");
            if (spec.sweep->values.empty())
                throw ValidationError("sweep", "at least one value required");
            for (std::size_t i = 1; i < spec.sweep->values.size(); ++i)
                if (!(spec.sweep->values[i] > spec.sweep->values[i - 1]))
                    throw ValidationError("sweep", "values must be strictly increasing");
        }
    }

    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec)
    {
        validate(spec);
        std::vector<Cell> cells;
        const std::vector<double> values = spec.sweep ? spec.sweep->values : std::vector<double>{0.0};
        for (std::uint64_t seed : spec.seeds)
            for (double v : values)
                cells.push_back({seed, v});

        std::vector<std::vector<ResultRow>> per_cell(cells.size());
        const int workers = std::clamp(spec.threads, 1, int(std::max<std::size_t>(cells.size(), 1)));
        std::atomic<std::size_t> next{0};
        auto work = [&]
        {
            for (std::size_t i = next++; i < cells.size(); i = next++)
                per_cell[i] = run_cell(spec, cells[i]);
        };
        if (workers == 1)
            work();
        else
        {
            std::vector<std::jthread> pool;
            for (int t = 0; t < workers; ++t)
                pool.emplace_back(work);
        }

        std::vector<ResultRow> rows;
        for (auto &cell_rows : per_cell)
            for (auto &row : cell_rows)
                rows.push_back(std::move(row));
        return rows;
    }

    std::string format_double(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, res.ptr);
    }

    std::string to_csv(const std::vector<ResultRow> &rows, const CsvOptions &options)
    {
        std::string out = csv_header;
        out += '\n';
        for (const auto &r : rows)
        {
            out += std::to_string(r.seed);
            out += ',';
            out += r.scheme;
            out += ',';
            out += r.sweep_param;
            out += ',';
            out += format_double(r.sweep_value);
            out += ',';
            out += format_double(r.se_sum);
            out += ',';
            out += format_double(r.se_per_subcarrier);
            out += ',';
            out += std::to_string(r.iterations);
            out += ',';
            out += format_double(options.zero_wall_time ? 0.0 : r.wall_time);
            out += '\n';
        }
        return out;
    }

    namespace
    {
        void write_file(const std::filesystem::path &path, const std::string &content)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw FileError("cannot open '" + path.string() + "' for writing");
            out.write(content.data(), std::streamsize(content.size()));
            if (!out)
                throw FileError("write to '" + path.string() + "' failed");
        }
    }

    void emit_csv(const std::vector<ResultRow> &rows, const std::filesystem::path &path, const CsvOptions &options)
    {
        write_file(path, to_csv(rows, options));
    }

    Summary summarize(const std::vector<ResultRow> &rows, std::optional<double> only_sweep_value)
    {
        Summary s;
        auto selected = [&](const ResultRow &r)
        { return r.status == RowStatus::Ok && (!only_sweep_value || r.sweep_value == *only_sweep_value); };

        for (Scheme scheme : {Scheme::TFA, Scheme::SMA, Scheme::ERA, Scheme::MARA})
        {
            const std::string name(to_string(scheme));
            std::vector<double> v;
            for (const auto &r : rows)
                if (selected(r) && r.scheme == name)
                    v.push_back(r.se_sum);
            if (v.empty())
            {
                s.notices.push_back("no rows for scheme " + name);
                continue;
            }
            SchemeSummary ss;
            ss.scheme = name;
            ss.count = v.size();
            ss.min = *std::min_element(v.begin(), v.end());
            double shifted = 0.0;
            for (double x : v)
                shifted += x - ss.min;
            ss.mean = ss.min + shifted / double(v.size());
            double var = 0.0;
            for (double x : v)
                var += (x - ss.mean) * (x - ss.mean);
            ss.std = std::sqrt(var / double(v.size()));
            s.schemes.push_back(ss);
        }

        std::map<std::pair<std::uint64_t, double>, std::pair<double, double>> cells; // (TFA, MARA)
        std::map<std::pair<std::uint64_t, double>, int> present;
        for (const auto &r : rows)
        {
            if (!selected(r))
                continue;
            const auto key = std::make_pair(r.seed, r.sweep_value);
            if (r.scheme == "TFA")
            {
                cells[key].first = r.se_sum;
                present[key] |= 1;
            }
            else if (r.scheme == "MARA")
            {
                cells[key].second = r.se_sum;
                present[key] |= 2;
            }
        }
        double ratio_sum = 0.0;
        int ratio_count = 0;
        for (const auto &[key, mask] : present)
            if (mask == 3 && cells[key].first > 0.0)
            {
                ratio_sum += cells[key].second / cells[key].first;
                ++ratio_count;
            }
        if (ratio_count > 0)
            s.mara_tfa_ratio = ratio_sum / double(ratio_count);
        else
            s.notices.push_back("MARA/TFA ratio not applicable");
        return s;
    }

    std::string format_summary(const Summary &summary)
    {
        std::ostringstream os;
        os << std::left << std::setw(8) << "scheme" << std::right << std::setw(8) << "n" << std::setw(14) << "mean_se"
           << std::setw(14) << "std_se" << std::setw(14) << "min_se" << '\n';
        os << std::fixed << std::setprecision(4);
        for (const auto &s : summary.schemes)
            os << std::left << std::setw(8) << s.scheme << std::right << std::setw(8) << s.count << std::setw(14)
               << s.mean << std::setw(14) << s.std << std::setw(14) << s.min << '\n';
        if (summary.mara_tfa_ratio)
            os << "MARA/TFA ratio: " << *summary.mara_tfa_ratio << '\n';
        else
            os << "MARA/TFA ratio: n/a\n";
        for (const auto &n : summary.notices)
            os << "note: " << n << '\n';
        return os.str();
    }

    std::string summary_csv(const Summary &summary)
    {
        std::string out = "scheme,mean_se,std_se,min_se\n";
        for (const auto &s : summary.schemes)
            out += s.scheme + ',' + format_double(s.mean) + ',' + format_double(s.std) + ',' + format_double(s.min) + '\n';
        return out;
    }

    ExperimentSpec reference_experiment()
    {
        ExperimentSpec spec;
        spec.base = SystemConfig{};
        spec.base.num_bs_antennas = 4;
        spec.base.num_ues = 2;
        spec.base.num_subcarriers = 8;
        spec.base.num_paths_per_ue = 6;
        spec.base.shod_max_degree = 2;
        for (std::uint64_t s = 1; s <= 20; ++s)
            spec.seeds.push_back(s);
        spec.schemes = {Scheme::TFA, Scheme::SMA, Scheme::ERA, Scheme::MARA};
        spec.sweep = Sweep{"total_power_w", {0.1, 0.3, 1.0, 3.0, 10.0}};
        if (const char *env = std::getenv("MARA_SIM_THREADS"))
            spec.threads = std::max(1, std::atoi(env));
        else
            spec.threads = int(std::max(1u, std::thread::hardware_concurrency()));
        return spec;
    }
}
