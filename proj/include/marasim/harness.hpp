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

#ifndef MARASIM_HARNESS_HPP
#define MARASIM_HARNESS_HPP

#include "marasim/optim.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace marasim
{
    // Single-parameter sweep. Allowed names: total_power_w, num_bs_antennas, num_paths_per_ue,
    // shod_max_degree.
    struct Sweep
    {
        std::string name;
        std::vector<double> values; // strictly increasing
    };

    struct ExperimentSpec
    {
        SystemConfig base;
        std::vector<std::uint64_t> seeds;
        std::vector<Scheme> schemes;
        std::optional<Sweep> sweep;
        OptimOptions optim;
        int threads = 1;

        // Test hook: pretend MARA fell short of ERA in every cell
        bool inject_nesting_fault = false;
    };

    void validate(const ExperimentSpec &spec);

    enum class RowStatus
    {
        Ok,
        NestingViolation, // diagnostic row, scheme column carries the violated relation
        Error             // diagnostic row for a failed cell
    };

    struct ResultRow
    {
        std::uint64_t seed = 0;
        std::string scheme; // "TFA".."MARA", or a diagnostic label
        std::string sweep_param;
        double sweep_value = 0.0;
        double se_sum = 0.0;
        double se_per_subcarrier = 0.0;
        int iterations = 0;
        double wall_time = 0.0;

        RowStatus status = RowStatus::Ok;
        std::string message;              // diagnostics only
        std::vector<double> se_trace;     // not emitted
        bool trace_monotone = true;       // se_trace nondecreasing within 1e-9
    };

    // One (seed, sweep value, scheme) row per cell and scheme, in that order.
    // Failures of a cell yield a diagnostic row instead of aborting the run.
    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec);

    inline bool is_failure(const ResultRow &row) { return row.status != RowStatus::Ok; }

    struct CsvOptions
    {
        // Write 0 in the wall_time_s column so repeated runs produce identical bytes
        bool zero_wall_time = false;
    };

    inline constexpr const char *csv_header =
        "seed,scheme,sweep_param,sweep_value,se_sum_bps_hz,se_per_sc_bps_hz,iterations,wall_time_s";

    // Shortest round-trip decimal for doubles
    std::string format_double(double x);

    std::string to_csv(const std::vector<ResultRow> &rows, const CsvOptions &options = {});
    void emit_csv(const std::vector<ResultRow> &rows, const std::filesystem::path &path,
                  const CsvOptions &options = {});

    struct SchemeSummary
    {
        std::string scheme;
        std::size_t count = 0;
        double mean = 0.0;
        double std = 0.0; // population standard deviation
        double min = 0.0;
    };

    struct Summary
    {
        std::vector<SchemeSummary> schemes;   // TFA, SMA, ERA, MARA order, missing ones omitted
        std::vector<std::string> notices;     // e.g. schemes without rows
        std::optional<double> mara_tfa_ratio; // mean over cells of MARA / TFA
    };

    // Aggregates Ok rows; if only_sweep_value is set, restricts to rows at that sweep value.
    Summary summarize(const std::vector<ResultRow> &rows, std::optional<double> only_sweep_value = std::nullopt);

    std::string format_summary(const Summary &summary);
    std::string summary_csv(const Summary &summary);

    // Default experiment: P_T sweep at M=4, U=2, G=8, L=6, N=2 over 20 seeds.
    ExperimentSpec reference_experiment();
}

#endif
