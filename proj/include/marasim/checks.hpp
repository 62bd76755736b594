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

#ifndef MARASIM_CHECKS_HPP
#define MARASIM_CHECKS_HPP

#include "marasim/optim.hpp"

#include <random>
#include <string>
#include <vector>

namespace marasim
{
    // Outcome of one self-check suite
    struct CheckResult
    {
        std::string name;
        bool passed = false;
        double worst = 0.0;     // largest observed error
        double tolerance = 0.0;
        int cases = 0;
    };

    struct CheckOptions
    {
        SystemConfig config;   // sizes and basis degree of the random instances
        OptimOptions optim;    // fd_step is taken from here
        int instances = 20;
        std::uint64_t seed = 7;
    };

    // Random feasible state: positions uniform in the movement balls, unit coefficient vectors
    AntennaState random_state(const Scenario &scenario, int K, std::mt19937_64 &rng);

    // Random precoders scaled to the configured total power
    PrecoderSet random_precoders(const Scenario &scenario, std::mt19937_64 &rng);

    // h(u, m, g) by the unfactored multipath sum, evaluating the pattern per path
    cplx direct_channel_coefficient(const Scenario &scenario, const BasisSet &basis, const AntennaState &state, int u,
                                    int m, int g);

    // Central differences of the sum SE; positions step = fd_step * lambda, patterns step = fd_step
    Eigen::Matrix3Xd fd_gradient_positions(const ChannelModel &model, const AntennaState &state,
                                           const PrecoderSet &precoders, double fd_step);
    Eigen::MatrixXd fd_gradient_patterns(const ChannelModel &model, const AntennaState &state,
                                         const PrecoderSet &precoders, double fd_step);

    CheckResult check_orthonormality(const CheckOptions &opts);
    CheckResult check_parseval(const CheckOptions &opts);
    CheckResult check_factorization(const CheckOptions &opts);
    CheckResult check_se_equivalence(const CheckOptions &opts);
    CheckResult check_position_gradient(const CheckOptions &opts);
    CheckResult check_pattern_gradient(const CheckOptions &opts);
    CheckResult check_zf_nulling(const CheckOptions &opts);

    std::vector<CheckResult> run_all_checks(const CheckOptions &opts);

    // Optimizer-vs-exhaustive cross checks on desk-scale instances.
    struct OracleCase
    {
        double optimized = 0.0; // SE reached by the gradient method
        double reference = 0.0; // SE of the brute-force grid or closed-form optimum
        double gap() const { return (reference - optimized) / reference; } // > 0: optimizer fell short
    };

    // Single antenna, single UE, two paths. Positions: optimize_positions vs brute_force_positions
    // with a grid step of grid_step_fraction * d, precoders fixed at the TFA zero-forcing solution.
    SystemConfig position_oracle_config(std::uint64_t seed);
    OracleCase position_oracle_case(std::uint64_t seed, double grid_step_fraction, const OptimOptions &opts);

    // Single antenna, single UE, single subcarrier. Patterns: optimize_patterns vs the best unit
    // alpha for |q^H alpha|^2, the leading eigenvector of Re(q q^H).
    SystemConfig pattern_oracle_config(std::uint64_t seed);
    OracleCase pattern_oracle_case(std::uint64_t seed, const OptimOptions &opts);
}

#endif
