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
#include "helpers.hpp"
#include "marasim/harness.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace marasim;
using Catch::Matchers::ContainsSubstring;

namespace
{
    struct Outcome
    {
        int code;
        std::string out, err;
    };

    Outcome invoke(std::vector<std::string> args)
    {
        args.insert(args.begin(), "mara_sim");
        std::vector<char *> argv;
        for (auto &a : args)
            argv.push_back(a.data());
        std::ostringstream out, err;
        const int code = cli::main(int(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    std::filesystem::path fresh_dir(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("marasim_cli_" + name);
        std::filesystem::remove_all(dir);
        return dir;
    }

    std::string read_file(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    const std::vector<std::string> fast = {"--set", "num_bs_antennas=3", "--set", "num_subcarriers=2",
                                           "--set", "num_paths_per_ue=3", "--set", "shod_max_degree=1",
                                           "--set", "max_outer_iters=4", "--set", "restarts=1"};

    std::vector<std::string> with_fast(std::vector<std::string> args)
    {
        args.insert(args.end(), fast.begin(), fast.end());
        return args;
    }
}

TEST_CASE("run writes results and summary", "[cli]")
{
    const auto dir = fresh_dir("run");
    const Outcome o = invoke(with_fast({"run", "--out", dir.string(), "--seeds", "1-3", "--json-summary"}));
    CHECK(o.code == cli::exit_ok);
    CHECK(o.err.empty());
    const std::string results = read_file(dir / "results.csv");
    CHECK(results.rfind(csv_header, 0) == 0);
    CHECK(std::count(results.begin(), results.end(), '\n') == 1 + 3 * 4);
    CHECK(read_file(dir / "summary.csv").rfind("scheme,mean_se,std_se,min_se\n", 0) == 0);
    CHECK(std::filesystem::exists(dir / "summary.json"));
    CHECK_THAT(o.out, ContainsSubstring("MARA"));
}

TEST_CASE("run with a config file and a sweep", "[cli]")
{
    const auto dir = fresh_dir("sweep");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"num_bs_antennas": 2, "num_ues": 2, "num_subcarriers": 1,
        "num_paths_per_ue": 3, "shod_max_degree": 1, "schemes": ["TFA", "MARA"]})";
    const Outcome o = invoke({"run", "--config", (dir / "cfg.json").string(), "--out", dir.string(), "--seeds", "4,5",
                              "--sweep", "total_power_w=0.5,2", "--set", "max_outer_iters=3", "-q", "--no-wall-time"});
    CHECK(o.code == cli::exit_ok);
    CHECK(o.out.empty());
    const std::string results = read_file(dir / "results.csv");
    CHECK(std::count(results.begin(), results.end(), '\n') == 1 + 2 * 2 * 2);
    CHECK_THAT(results, ContainsSubstring("4,TFA,total_power_w,0.5,"));
    CHECK_THAT(results, ContainsSubstring(",0\n"));
}

TEST_CASE("run output is byte-stable without wall time", "[cli]")
{
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    REQUIRE(invoke(with_fast({"run", "--out", a.string(), "--seeds", "1,2", "--no-wall-time", "-q"})).code == 0);
    REQUIRE(invoke(with_fast({"run", "--out", b.string(), "--seeds", "1,2", "--no-wall-time", "-q"})).code == 0);
    CHECK(read_file(a / "results.csv") == read_file(b / "results.csv"));
    CHECK(read_file(a / "summary.csv") == read_file(b / "summary.csv"));
}

TEST_CASE("unknown override key is an error naming the key", "[cli]")
{
    const Outcome o = invoke({"run", "--out", fresh_dir("bad").string(), "--set", "num_antenas=4"});
    CHECK(o.code == cli::exit_error);
    CHECK_THAT(o.err, ContainsSubstring("num_antenas"));
}

TEST_CASE("invalid inputs exit with 1", "[cli]")
{
    CHECK(invoke({}).code == cli::exit_error);
    CHECK(invoke({"frobnicate"}).code == cli::exit_error);
    CHECK(invoke({"run", "--config", "/nonexistent.json"}).code == cli::exit_error);
    const Outcome mu = invoke({"run", "--out", fresh_dir("mu").string(), "--set", "num_bs_antennas=1"});
    CHECK(mu.code == cli::exit_error);
    CHECK_THAT(mu.err, ContainsSubstring("M ≥ U"));
    CHECK(invoke({"run", "--seeds", "x"}).code == cli::exit_error);
    CHECK(invoke({"run", "--sweep", "total_power_w=2,1"}).code == cli::exit_error);
}

TEST_CASE("injected nesting violation exits with 2", "[cli]")
{
    const Outcome o = invoke(with_fast({"run", "--out", fresh_dir("fault").string(), "--inject-nesting-fault", "-q"}));
    CHECK(o.code == cli::exit_assertion);
    CHECK_THAT(o.err, ContainsSubstring("nesting"));
}

TEST_CASE("check lists every suite", "[cli]")
{
    const Outcome o = invoke({"check"});
    CHECK(o.code == cli::exit_ok);
    for (const char *suite : {"orthonormality", "Parseval", "factorization", "equivalence", "position gradient",
                              "pattern gradient", "zero-forcing"})
        CHECK_THAT(o.out, ContainsSubstring(suite));
    CHECK_THAT(o.out, !ContainsSubstring("FAIL"));
}

TEST_CASE("check detects a miscalibrated finite-difference step", "[cli]")
{
    const Outcome o = invoke({"check", "--set", "fd_step=1e-1"});
    CHECK(o.code == cli::exit_assertion);
    CHECK_THAT(o.out, ContainsSubstring("FAIL position gradient"));
}

TEST_CASE("check with a degree-6 basis", "[cli]")
{
    const Outcome o = invoke({"check", "--set", "shod_max_degree=6"});
    CHECK_THAT(o.out, ContainsSubstring("PASS basis orthonormality"));
    CHECK(o.code == cli::exit_ok);
}

TEST_CASE("oracle comparisons", "[cli]")
{
    const Outcome a = invoke({"oracle"});
    CHECK(a.code == cli::exit_ok);
    CHECK_THAT(a.out, ContainsSubstring("max relative SE gap"));
    CHECK(invoke({"oracle"}).out == a.out);

    CHECK(invoke({"oracle", "--grid-step", "1e-4"}).code == cli::exit_error);
}

TEST_CASE("degenerate oracle grid measures the optimizer's own gain", "[cli]")
{
    const OptimOptions opts;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const OracleCase c = position_oracle_case(seed, 1.0, opts);
        const SystemConfig cfg = position_oracle_config(seed);
        const Scenario sc = generate_scenario(cfg);
        const ChannelModel model(sc, BasisSet(cfg.shod_max_degree));
        const AntennaState start = initial_state(sc, model.basis_size());
        const PrecoderSet w =
            digital_precoder(model.tensor(start, Scheme::TFA), cfg.total_power, cfg.noise_power, PrecoderMethod::ZF);
        const double center = objective(model, start, w);
        CHECK(c.reference == center);
        CHECK(c.gap() == Catch::Approx(-(c.optimized - center) / center).margin(1e-15));
    }
}
