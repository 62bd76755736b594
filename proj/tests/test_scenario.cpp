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

#include "helpers.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numeric>

using namespace marasim;
using Catch::Matchers::ContainsSubstring;

namespace
{
    std::filesystem::path write_temp(const std::string &name, const std::string &text)
    {
        const auto path = std::filesystem::temp_directory_path() / ("marasim_" + name);
        std::ofstream(path) << text;
        return path;
    }
}

TEST_CASE("minimal config file keeps the half-wavelength spacing default", "[scenario]")
{
    const auto path = write_temp("minimal.json", R"({"num_bs_antennas": 4, "num_ues": 2, "num_subcarriers": 8})");
    const SystemConfig c = load_config(path);
    CHECK(c.num_bs_antennas == 4);
    CHECK(c.num_ues == 2);
    CHECK(c.num_subcarriers == 8);
    CHECK(c.antenna_spacing_wavelengths == 0.5);
    CHECK(c.antenna_spacing() == Catch::Approx(c.wavelength() / 2).epsilon(1e-15));
}

TEST_CASE("more UEs than antennas is rejected", "[scenario]")
{
    const auto path = write_temp("m1u2.json", R"({"num_bs_antennas": 1, "num_ues": 2})");
    try
    {
        load_config(path);
        FAIL("expected a validation error");
    }
    catch (const ValidationError &e)
    {
        CHECK(e.field() == "num_bs_antennas");
        CHECK_THAT(e.what(), ContainsSubstring("M ≥ U required"));
    }
}

TEST_CASE("loading the same file twice gives identical configs", "[scenario]")
{
    const auto path = write_temp("twice.json", R"({"num_paths_per_ue": 3, "seed": 42, "schemes": ["TFA", "MARA"]})");
    CHECK(load_config(path) == load_config(path));
}

TEST_CASE("config errors", "[scenario]")
{
    CHECK_THROWS_AS(load_config("/nonexistent/marasim.json"), FileError);
    CHECK_THROWS_MATCHES(parse_config("{\n  \"num_ues\": 2,\n  \"num_ues_typo\": 3\n}"), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("num_ues_typo")));
    CHECK_THROWS_MATCHES(parse_config("{\n  \"num_ues\": 2,\n  oops\n}"), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("line 3")));
    CHECK_THROWS_AS(parse_config(R"({"schemes": ["TFA", "XYZ"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"num_subcarriers": 2.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"noise_power_w": 0})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"shod_max_degree": -1})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schemes": []})"), ValidationError);
}

TEST_CASE("every documented key is accepted", "[scenario]")
{
    const std::string text = R"({
        "carrier_frequency_hz": 28e9, "num_subcarriers": 4, "subcarrier_spacing_hz": 120e3,
        "num_ues": 3, "num_bs_antennas": 5, "antenna_spacing_wavelengths": 0.75, "num_paths_per_ue": 7,
        "max_delay_s": 2e-7, "total_power_w": 2.5, "noise_power_w": 0.1, "shod_max_degree": 3,
        "seed": 18446744073709551615, "schemes": ["ERA", "TFA"]})";
    const SystemConfig c = parse_config(text);
    CHECK(c.carrier_frequency == 28e9);
    CHECK(c.num_subcarriers == 4);
    CHECK(c.subcarrier_spacing == 120e3);
    CHECK(c.num_ues == 3);
    CHECK(c.num_bs_antennas == 5);
    CHECK(c.antenna_spacing_wavelengths == 0.75);
    CHECK(c.num_paths_per_ue == 7);
    CHECK(c.max_delay == 2e-7);
    CHECK(c.total_power == 2.5);
    CHECK(c.noise_power == 0.1);
    CHECK(c.shod_max_degree == 3);
    CHECK(c.seed == 18446744073709551615ull);
    CHECK(c.schemes == std::vector<Scheme>{Scheme::ERA, Scheme::TFA});
    CHECK(config_keys().size() == 13);
}

TEST_CASE("overrides", "[scenario]")
{
    SystemConfig c;
    apply_override(c, "num_ues", "3");
    apply_override(c, "total_power_w", "0.25");
    apply_override(c, "schemes", "TFA,MARA");
    CHECK(c.num_ues == 3);
    CHECK(c.total_power == 0.25);
    CHECK(c.schemes == std::vector<Scheme>{Scheme::TFA, Scheme::MARA});
    CHECK_THROWS_AS(apply_override(c, "bogus", "1"), ConfigError);
}

TEST_CASE("subcarrier grid", "[scenario]")
{
    SystemConfig c;
    c.num_subcarriers = 1;
    CHECK(subcarrier_frequencies(c) == std::vector<double>{c.carrier_frequency});

    c.num_subcarriers = 2;
    const double s = c.subcarrier_spacing;
    CHECK(subcarrier_frequencies(c) == std::vector<double>{c.carrier_frequency - s / 2, c.carrier_frequency + s / 2});

    c.num_subcarriers = 8;
    const auto f = subcarrier_frequencies(c);
    REQUIRE(f.size() == 8);
    double offset = 0.0;
    for (double fg : f)
    {
        offset += fg - c.carrier_frequency;
        CHECK(std::abs(fg - c.carrier_frequency) <= 8 * s / 2);
    }
    CHECK(offset == 0.0);
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) / 8 == c.carrier_frequency);
}

TEST_CASE("scenario generation is deterministic", "[scenario]")
{
    const SystemConfig c = test::small_config();
    const Scenario a = generate_scenario(c), b = generate_scenario(c);
    CHECK(a.initial_positions == b.initial_positions);
    CHECK(a.ue_positions == b.ue_positions);
    for (int u = 0; u < c.num_ues; ++u)
    {
        CHECK(a.path_sets[u].gains == b.path_sets[u].gains);
        CHECK(a.path_sets[u].k_tx == b.path_sets[u].k_tx);
        CHECK(a.path_sets[u].k_rx == b.path_sets[u].k_rx);
        CHECK(a.path_sets[u].delays == b.path_sets[u].delays);
    }
    SystemConfig other = c;
    other.seed = 2;
    CHECK(generate_scenario(other).path_sets[0].gains != a.path_sets[0].gains);
}

TEST_CASE("scenario invariants", "[scenario]")
{
    SystemConfig c = test::small_config(4, 2, 8, 6, 2, 9);
    const Scenario sc = generate_scenario(c);
    const double d = c.antenna_spacing();
    for (int m = 0; m < 4; ++m)
    {
        CHECK(sc.initial_positions(1, m) == 0.0);
        CHECK(sc.initial_positions(2, m) == 0.0);
        if (m > 0)
            CHECK(sc.initial_positions(0, m) - sc.initial_positions(0, m - 1) == Catch::Approx(d).epsilon(1e-12));
    }
    for (const auto &ps : sc.path_sets)
    {
        CHECK(ps.num_paths() == 6);
        for (int i = 0; i < ps.num_paths(); ++i)
        {
            CHECK(std::abs(ps.k_tx.col(i).norm() - 1.0) < 1e-12);
            CHECK(std::abs(ps.k_rx.col(i).norm() - 1.0) < 1e-12);
            CHECK(ps.delays(i) >= 0.0);
            CHECK(ps.delays(i) <= c.max_delay);
        }
    }
    for (int u = 0; u < 2; ++u)
    {
        const double r = sc.ue_positions.col(u).norm();
        CHECK(r >= 50.0);
        CHECK(r <= 200.0 + 1e-9);
    }

    c.num_paths_per_ue = 1;
    for (const auto &ps : generate_scenario(c).path_sets)
        CHECK(ps.num_paths() == 1);
}

TEST_CASE("path gains have variance 1/L", "[scenario]")
{
    SystemConfig c = test::small_config(1, 1, 1, 100000, 0, 5);
    const Scenario sc = generate_scenario(c);
    const double mean = sc.path_sets[0].gains.squaredNorm() / 100000.0;
    CHECK(std::abs(mean * 100000.0 - 1.0) < 0.02);
}
