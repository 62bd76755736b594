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

#include "marasim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace marasim
{
    using json = nlohmann::json;

    std::string_view to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::TFA:
            return "TFA";
        case Scheme::SMA:
            return "SMA";
        case Scheme::ERA:
            return "ERA";
        case Scheme::MARA:
            return "MARA";
        }
        return "?";
    }

    Scheme scheme_from_string(std::string_view name)
    {
        for (Scheme s : {Scheme::TFA, Scheme::SMA, Scheme::ERA, Scheme::MARA})
            if (to_string(s) == name)
                return s;
        throw ConfigError("unknown scheme '" + std::string(name) + "' (expected TFA, SMA, ERA or MARA)");
    }

    const std::vector<std::string> &config_keys()
    {
        static const std::vector<std::string> keys = {
            "carrier_frequency_hz", "num_subcarriers", "subcarrier_spacing_hz", "num_ues",
            "num_bs_antennas", "antenna_spacing_wavelengths", "num_paths_per_ue", "max_delay_s",
            "total_power_w", "noise_power_w", "shod_max_degree", "seed", "schemes"};
        return keys;
    }

    void validate(const SystemConfig &c)
    {
        auto require = [](bool ok, const char *field, const std::string &what)
        {
            if (!ok)
                throw ValidationError(field, what);
        };
        require(c.carrier_frequency > 0.0 && std::isfinite(c.carrier_frequency), "carrier_frequency_hz", "must be positive");
        require(c.num_subcarriers >= 1, "num_subcarriers", "G >= 1 required");
        require(c.subcarrier_spacing > 0.0 && std::isfinite(c.subcarrier_spacing), "subcarrier_spacing_hz", "must be positive");
        require(c.num_ues >= 1, "num_ues", "U >= 1 required");
        require(c.num_bs_antennas >= c.num_ues, "num_bs_antennas",
                "M ≥ U required (M=" + std::to_string(c.num_bs_antennas) + ", U=" + std::to_string(c.num_ues) + ")");
        require(c.antenna_spacing_wavelengths > 0.0 && std::isfinite(c.antenna_spacing_wavelengths),
                "antenna_spacing_wavelengths", "d > 0 required");
        require(c.num_paths_per_ue >= 1, "num_paths_per_ue", "L >= 1 required");
        require(c.max_delay >= 0.0 && std::isfinite(c.max_delay), "max_delay_s", "must be non-negative");
        require(c.total_power > 0.0 && std::isfinite(c.total_power), "total_power_w", "P_T > 0 required");
        require(c.noise_power > 0.0 && std::isfinite(c.noise_power), "noise_power_w", "noise power > 0 required");
        require(c.shod_max_degree >= 0, "shod_max_degree", "N >= 0 required");
        require(!c.schemes.empty(), "schemes", "at least one scheme required");
        auto sorted = c.schemes;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "schemes", "duplicate scheme");
    }

    namespace
    {
        int line_of_offset(const std::string &text, std::size_t offset)
        {
            offset = std::min(offset, text.size());
            return 1 + int(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n'));
        }

        double get_real(const json &v, const std::string &key)
        {
            if (!v.is_number())
                throw ConfigError("key '" + key + "': expected a number");
            return v.get<double>();
        }

        long long get_integer(const json &v, const std::string &key)
        {
            if (v.is_number_integer())
                return v.get<long long>();
            if (v.is_number_float())
            {
                double x = v.get<double>();
                if (std::floor(x) == x && std::abs(x) < 9.0e15)
                    return (long long)x;
            }
            throw ConfigError("key '" + key + "': expected an integer");
        }

        void set_key(SystemConfig &c, const std::string &key, const json &v)
        {
            if (key == "carrier_frequency_hz")
                c.carrier_frequency = get_real(v, key);
            else if (key == "num_subcarriers")
                c.num_subcarriers = int(get_integer(v, key));
            else if (key == "subcarrier_spacing_hz")
                c.subcarrier_spacing = get_real(v, key);
            else if (key == "num_ues")
                c.num_ues = int(get_integer(v, key));
            else if (key == "num_bs_antennas")
                c.num_bs_antennas = int(get_integer(v, key));
            else if (key == "antenna_spacing_wavelengths")
                c.antenna_spacing_wavelengths = get_real(v, key);
            else if (key == "num_paths_per_ue")
                c.num_paths_per_ue = int(get_integer(v, key));
            else if (key == "max_delay_s")
                c.max_delay = get_real(v, key);
            else if (key == "total_power_w")
                c.total_power = get_real(v, key);
            else if (key == "noise_power_w")
                c.noise_power = get_real(v, key);
            else if (key == "shod_max_degree")
                c.shod_max_degree = int(get_integer(v, key));
            else if (key == "seed")
            {
                if (v.is_number_unsigned())
                    c.seed = v.get<std::uint64_t>();
                else
                {
                    long long s = get_integer(v, key);
                    if (s < 0)
                        throw ConfigError("key 'seed': expected a non-negative integer");
                    c.seed = std::uint64_t(s);
                }
            }
            else if (key == "schemes")
            {
                if (!v.is_array())
                    throw ConfigError("key 'schemes': expected an array of strings");
                c.schemes.clear();
                for (const auto &s : v)
                {
                    if (!s.is_string())
                        throw ConfigError("key 'schemes': expected an array of strings");
                    c.schemes.push_back(scheme_from_string(s.get<std::string>()));
                }
            }
            else
                throw ConfigError("unknown configuration key '" + key + "'");
        }
    }

    SystemConfig parse_config(const std::string &text)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("config parse error at line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
        }
        if (!doc.is_object())
            throw ConfigError("config parse error at line 1: top-level value must be an object");

        SystemConfig config;
        for (const auto &[key, value] : doc.items())
            set_key(config, key, value);
        validate(config);
        return config;
    }

    SystemConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw FileError("cannot open config file '" + path.string() + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        try
        {
            return parse_config(buffer.str());
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }

    void apply_override(SystemConfig &config, const std::string &key, const std::string &value)
    {
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw ConfigError("unknown configuration key '" + key + "'");

        json v;
        if (key == "schemes")
        {
            v = json::array();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    v.push_back(item);
        }
        else
        {
            try
            {
                v = json::parse(value);
            }
            catch (const json::parse_error &)
            {
                throw ConfigError("key '" + key + "': cannot parse value '" + value + "'");
            }
        }
        set_key(config, key, v);
    }

    std::vector<double> subcarrier_frequencies(const SystemConfig &config)
    {
        const int G = config.num_subcarriers;
        std::vector<double> f(std::size_t(std::max(G, 0)));
        for (int g = 1; g <= G; ++g)
            f[std::size_t(g - 1)] = config.carrier_frequency + (double(g) - 0.5 * double(G + 1)) * config.subcarrier_spacing;
        return f;
    }

    namespace
    {
        Vec3 random_unit_vector(std::mt19937_64 &rng)
        {
            std::normal_distribution<double> normal(0.0, 1.0);
            Vec3 v;
            do
            {
                v = Vec3(normal(rng), normal(rng), normal(rng));
            } while (v.norm() < 1e-8);
            v.normalize();
            return v / v.norm(); // second pass pulls the norm to within an ulp of 1
        }
    }

    Scenario generate_scenario(const SystemConfig &config, const PlacementOptions &placement)
    {
        validate(config);

        const int M = config.num_bs_antennas;
        const int U = config.num_ues;
        const int L = config.num_paths_per_ue;
        const double d = config.antenna_spacing();

        Scenario sc;
        sc.config = config;
        sc.subcarrier_frequencies = subcarrier_frequencies(config);

        sc.initial_positions = Eigen::Matrix3Xd::Zero(3, M);
        for (int m = 0; m < M; ++m)
            sc.initial_positions(0, m) = (double(m) - 0.5 * double(M - 1)) * d;

        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const double r2_min = placement.min_distance * placement.min_distance;
        const double r2_max = placement.max_distance * placement.max_distance;
        const double gain_std = std::sqrt(0.5 / double(L)); // per real dimension

        sc.ue_positions = Eigen::Matrix3Xd::Zero(3, U);
        sc.path_sets.resize(std::size_t(U));
        for (int u = 0; u < U; ++u)
        {
            const double r = std::sqrt(r2_min + (r2_max - r2_min) * unit(rng));
            const double az = 2.0 * std::numbers::pi * unit(rng);
            sc.ue_positions.col(u) = Vec3(r * std::cos(az), r * std::sin(az), 0.0);

            PathSet &ps = sc.path_sets[std::size_t(u)];
            ps.gains.resize(L);
            ps.k_tx.resize(3, L);
            ps.k_rx.resize(3, L);
            ps.delays.resize(L);
            for (int i = 0; i < L; ++i)
            {
                const double re = gain_std * normal(rng);
                const double im = gain_std * normal(rng);
                ps.gains(i) = cplx(re, im);
                ps.k_tx.col(i) = random_unit_vector(rng);
                ps.k_rx.col(i) = random_unit_vector(rng);
                ps.delays(i) = std::min(config.max_delay * unit(rng), config.max_delay);
            }
        }
        return sc;
    }
}
