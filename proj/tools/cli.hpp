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

#ifndef MARASIM_CLI_HPP
#define MARASIM_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace marasim::cli
{
    // Stable exit codes
    inline constexpr int exit_ok = 0;
    inline constexpr int exit_error = 1;
    inline constexpr int exit_assertion = 2;

    struct Invocation
    {
        std::string subcommand; // run, check, oracle
        std::filesystem::path config_path;
        std::filesystem::path out_dir = ".";
        std::vector<std::string> overrides; // key=value
        std::string seeds;                  // "1,2,3" or "1-20"
        std::string sweep;                  // "total_power_w=0.1,1,10"
        bool quiet = false;
        bool json_summary = false;
        bool no_wall_time = false;
        double grid_step_fraction = 1.0 / 40.0; // oracle grid step, fraction of d
        int instances = 10;                     // oracle cases per kind
        bool inject_nesting_fault = false;
    };

    int cmd_run(const Invocation &inv, std::ostream &out, std::ostream &err);
    int cmd_check(const Invocation &inv, std::ostream &out, std::ostream &err);
    int cmd_oracle(const Invocation &inv, std::ostream &out, std::ostream &err);

    // Parses argv and dispatches to the subcommand
    int main(int argc, char **argv, std::ostream &out, std::ostream &err);
}

#endif
