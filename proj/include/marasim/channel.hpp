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

#ifndef MARASIM_CHANNEL_HPP
#define MARASIM_CHANNEL_HPP

#include "marasim/scenario.hpp"
#include "marasim/shod.hpp"

#include <vector>

namespace marasim
{
    // Decision variables of the BS array: one position and one pattern-coefficient
    // vector per antenna (columns).
    struct AntennaState
    {
        Eigen::Matrix3Xd positions;   // 3 x M [m]
        Eigen::MatrixXd coefficients; // K x M, unit-norm columns

        int num_antennas() const { return int(positions.cols()); }
    };

    // p_m = p_m^0 and alpha_m = (1, 0, ..., 0) for every antenna
    AntennaState initial_state(const Scenario &scenario, int K);

    // Movement region radius d/2 - 1e-6 d
    double movement_radius(const SystemConfig &config);

    // Radial clamp of each antenna into its movement ball
    void project_positions(const Scenario &scenario, Eigen::Matrix3Xd &positions);

    // Throws ContractError if the state is infeasible or violates the scheme's pinning
    void check_state(const Scenario &scenario, const AntennaState &state, Scheme scheme);

    // Channel coefficients h(u, m, g), stored as one U x M matrix per subcarrier.
    // Row u of per_subcarrier[g] is the row vector h_{u,g}^H of the receive equation.
    struct ChannelTensor
    {
        Scheme scheme = Scheme::TFA;
        std::vector<Eigen::MatrixXcd> per_subcarrier;

        int num_ues() const { return per_subcarrier.empty() ? 0 : int(per_subcarrier.front().rows()); }
        int num_antennas() const { return per_subcarrier.empty() ? 0 : int(per_subcarrier.front().cols()); }
        int num_subcarriers() const { return int(per_subcarrier.size()); }
        cplx operator()(int u, int m, int g) const { return per_subcarrier[std::size_t(g)](u, m); }
    };

    // b: entry i = exp(-j 2pi/lambda k_tx,i^T p)
    Eigen::VectorXcd tx_steering(const PathSet &path_set, const Vec3 &p, double wavelength);

    // a: entry i = exp(-j 2pi/lambda k_rx,i^T q)
    Eigen::VectorXcd rx_steering(const PathSet &path_set, const Vec3 &q, double wavelength);

    // x: entry i = gain_i exp(-j 2pi tau_i f)
    Eigen::VectorXcd path_gains(const PathSet &path_set, double frequency);

    // eCSI vector q with h = q^H alpha, q = Omega^T conj(a .* x .* b); receive pattern fixed to 1
    Eigen::VectorXcd ecsi(const PathSet &path_set, const Eigen::MatrixXd &omega, const Vec3 &p, const Vec3 &q_ue,
                          double frequency, double wavelength);

    // Per-scenario cache of everything in the channel that does not depend on the antenna
    // state: the Omega matrices, receive steering and delay-rotated path gains.
    class ChannelModel
    {
    public:
        ChannelModel(const Scenario &scenario, const BasisSet &basis);

        const Scenario &scenario() const { return scenario_; }
        const BasisSet &basis() const { return basis_; }
        int num_ues() const { return scenario_.num_ues(); }
        int num_antennas() const { return scenario_.num_antennas(); }
        int num_subcarriers() const { return scenario_.num_subcarriers(); }
        int basis_size() const { return basis_.size(); }
        double wave_number() const { return wave_number_; } // 2 pi / lambda

        const Eigen::MatrixXd &omega(int u) const { return omega_[std::size_t(u)]; }

        // a_u .* x_{u,g}, L_u x G
        const Eigen::MatrixXcd &rx_weighted_gains(int u) const { return ax_[std::size_t(u)]; }

        // Unified evaluation: h = q^H alpha for every (u, m, g)
        ChannelTensor tensor(const AntennaState &state, Scheme scheme) const;

    private:
        Scenario scenario_;
        BasisSet basis_;
        double wave_number_;
        std::vector<Eigen::MatrixXd> omega_;
        std::vector<Eigen::MatrixXcd> ax_;
    };

    // Checks the scheme pinning, then evaluates the tensor.
    ChannelTensor channel_tensor(const ChannelModel &model, const AntennaState &state, Scheme scheme);
}

#endif
