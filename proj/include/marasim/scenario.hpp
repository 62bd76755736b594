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

#ifndef MARASIM_SCENARIO_HPP
#define MARASIM_SCENARIO_HPP

#include "marasim/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace marasim
{
    // System parameters of one downlink MIMO-OFDM problem.
    // All keys have defaults; load_config() only overrides what the file names.
    struct SystemConfig
    {
        double carrier_frequency = 3.5e9;      // [Hz]
        int num_subcarriers = 8;               // G
        double subcarrier_spacing = 60.0e3;    // [Hz]
        int num_ues = 2;                       // U
        int num_bs_antennas = 4;               // M
        double antenna_spacing_wavelengths = 0.5;
        int num_paths_per_ue = 6;              // L
        double max_delay = 1.0e-6;             // [s]
        double total_power = 1.0;              // P_T [W]
        double noise_power = 1.0e-2;           // sigma_n^2 [W]
        int shod_max_degree = 2;               // N, basis size K = (N+1)^2
        std::uint64_t seed = 1;
        std::vector<Scheme> schemes = {Scheme::TFA, Scheme::SMA, Scheme::ERA, Scheme::MARA};

        double wavelength() const { return speed_of_light / carrier_frequency; }
        double antenna_spacing() const { return antenna_spacing_wavelengths * wavelength(); } // d [m]
        int basis_size() const { return (shod_max_degree + 1) * (shod_max_degree + 1); }

        bool operator==(const SystemConfig &) const = default;
    };

    // Throws ValidationError naming the first offending field.
    void validate(const SystemConfig &config);

    // Parse the JSON configuration text. Unknown keys and syntax errors raise ConfigError
    // (syntax errors carry the line number), invariant violations raise ValidationError.
    SystemConfig parse_config(const std::string &text);
    SystemConfig load_config(const std::filesystem::path &path);

    // Names accepted by the configuration file, in file order.
    const std::vector<std::string> &config_keys();

    // Set one key from its textual value ("num_ues", "3"). Does not validate.
    void apply_override(SystemConfig &config, const std::string &key, const std::string &value);

    // Multipath parameters of one UE, stored column-wise (one column / entry per path).
    struct PathSet
    {
        Eigen::VectorXcd gains;     // complex path gains before delay rotation
        Eigen::Matrix3Xd k_tx;      // unit wave vectors at the BS
        Eigen::Matrix3Xd k_rx;      // unit wave vectors at the UE
        Eigen::VectorXd delays;     // [s]

        int num_paths() const { return int(gains.size()); }
    };

    struct Scenario
    {
        SystemConfig config;
        Eigen::Matrix3Xd initial_positions;     // p_m^0, one column per BS antenna [m]
        Eigen::Matrix3Xd ue_positions;          // q_u [m]
        std::vector<PathSet> path_sets;         // one per UE
        std::vector<double> subcarrier_frequencies;

        int num_ues() const { return config.num_ues; }
        int num_antennas() const { return config.num_bs_antennas; }
        int num_subcarriers() const { return config.num_subcarriers; }
        double wavelength() const { return config.wavelength(); }
    };

    // UE placement annulus in the horizontal plane around the array center.
    struct PlacementOptions
    {
        double min_distance = 50.0;  // [m]
        double max_distance = 200.0; // [m]
    };

    // f_g = fc + (g - (G+1)/2) * spacing, g = 1..G
    std::vector<double> subcarrier_frequencies(const SystemConfig &config);

    // Draws path gains ~ CN(0, 1/L), wave vectors uniform on the unit sphere and delays
    // uniform on [0, max_delay], all from a generator seeded with config.seed.
    Scenario generate_scenario(const SystemConfig &config, const PlacementOptions &placement = {});
}

#endif
