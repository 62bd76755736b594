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

#ifndef MARASIM_TEST_HELPERS_HPP
#define MARASIM_TEST_HELPERS_HPP

#include "marasim/checks.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace marasim::test
{
    inline constexpr double pi = std::numbers::pi;

    // Small configuration for fast tests
    inline SystemConfig small_config(int M = 3, int U = 2, int G = 3, int L = 4, int N = 2, std::uint64_t seed = 1)
    {
        SystemConfig c;
        c.num_bs_antennas = M;
        c.num_ues = U;
        c.num_subcarriers = G;
        c.num_paths_per_ue = L;
        c.shod_max_degree = N;
        c.seed = seed;
        return c;
    }

    // Replace every delay by zero, which makes all subcarriers identical
    inline Scenario without_delays(Scenario sc)
    {
        for (auto &ps : sc.path_sets)
            ps.delays.setZero();
        return sc;
    }

    // Single path along the given unit directions
    inline PathSet single_path(cplx gain, const Vec3 &k_tx, const Vec3 &k_rx, double delay)
    {
        PathSet ps;
        ps.gains = Eigen::VectorXcd::Constant(1, gain);
        ps.k_tx = k_tx.normalized();
        ps.k_rx = k_rx.normalized();
        ps.delays = Eigen::VectorXd::Constant(1, delay);
        return ps;
    }

    inline Vec3 random_unit(std::mt19937_64 &rng)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        return Vec3(n(rng), n(rng), n(rng)).normalized();
    }

    inline double relative_difference(double a, double b)
    {
        return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    }
}

#endif
