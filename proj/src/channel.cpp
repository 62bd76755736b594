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

#include "marasim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace marasim
{
    AntennaState initial_state(const Scenario &scenario, int K)
    {
        AntennaState s;
        s.positions = scenario.initial_positions;
        s.coefficients = Eigen::MatrixXd::Zero(K, scenario.num_antennas());
        s.coefficients.row(0).setOnes();
        return s;
    }

    double movement_radius(const SystemConfig &config)
    {
        const double d = config.antenna_spacing();
        return 0.5 * d - 1e-6 * d;
    }

    void project_positions(const Scenario &scenario, Eigen::Matrix3Xd &positions)
    {
        const double r = movement_radius(scenario.config);
        for (int m = 0; m < positions.cols(); ++m)
        {
            Vec3 delta = positions.col(m) - scenario.initial_positions.col(m);
            const double n = delta.norm();
            if (n > r)
                positions.col(m) = scenario.initial_positions.col(m) + delta * (r / n);
        }
    }

    void check_state(const Scenario &scenario, const AntennaState &state, Scheme scheme)
    {
        const int M = scenario.num_antennas();
        if (state.positions.cols() != M || state.coefficients.cols() != M)
            throw ContractError("antenna state has " + std::to_string(state.positions.cols()) + " positions and " +
                                std::to_string(state.coefficients.cols()) + " coefficient vectors, expected " +
                                std::to_string(M));
        const double d = scenario.config.antenna_spacing();
        const double r = movement_radius(scenario.config);
        const int K = int(state.coefficients.rows());
        for (int m = 0; m < M; ++m)
        {
            const double shift = (state.positions.col(m) - scenario.initial_positions.col(m)).norm();
            if (shift > r + 1e-12 * d)
                throw ContractError("antenna " + std::to_string(m) + " is outside its movement region");
            if (!moves_positions(scheme) && shift > 1e-12 * d)
                throw ContractError("scheme " + std::string(to_string(scheme)) + " requires fixed positions (antenna " +
                                    std::to_string(m) + " moved)");
            const auto alpha = state.coefficients.col(m);
            if (std::abs(alpha.norm() - 1.0) > 1e-10)
                throw ContractError("pattern coefficients of antenna " + std::to_string(m) + " are not unit-norm");
            if (!shapes_patterns(scheme))
            {
                Eigen::VectorXd iso = isotropic_coefficients(K);
                if ((alpha - iso).cwiseAbs().maxCoeff() > 1e-12)
                    throw ContractError("scheme " + std::string(to_string(scheme)) +
                                        " requires the isotropic pattern (antenna " + std::to_string(m) + ")");
            }
        }
    }

    namespace
    {
        Eigen::VectorXcd phase_vector(const Eigen::Matrix3Xd &k, const Vec3 &p, double wavelength)
        {
            const double kappa = 2.0 * std::numbers::pi / wavelength;
            Eigen::VectorXcd out(k.cols());
            for (Eigen::Index i = 0; i < k.cols(); ++i)
                out(i) = std::polar(1.0, -kappa * Vec3(k.col(i)).dot(p));
            return out;
        }
    }

    Eigen::VectorXcd tx_steering(const PathSet &path_set, const Vec3 &p, double wavelength)
    {
        return phase_vector(path_set.k_tx, p, wavelength);
    }

    Eigen::VectorXcd rx_steering(const PathSet &path_set, const Vec3 &q, double wavelength)
    {
        return phase_vector(path_set.k_rx, q, wavelength);
    }

    Eigen::VectorXcd path_gains(const PathSet &path_set, double frequency)
    {
        const int L = path_set.num_paths();
        Eigen::VectorXcd x(L);
        for (int i = 0; i < L; ++i)
            x(i) = path_set.gains(i) * std::polar(1.0, -2.0 * std::numbers::pi * path_set.delays(i) * frequency);
        return x;
    }

    Eigen::VectorXcd ecsi(const PathSet &path_set, const Eigen::MatrixXd &omega, const Vec3 &p, const Vec3 &q_ue,
                          double frequency, double wavelength)
    {
        if (omega.rows() != path_set.num_paths())
            throw ContractError("ecsi: Omega has " + std::to_string(omega.rows()) + " rows for " +
                                std::to_string(path_set.num_paths()) + " paths");
        const Eigen::VectorXcd c = rx_steering(path_set, q_ue, wavelength).cwiseProduct(path_gains(path_set, frequency))
                                       .cwiseProduct(tx_steering(path_set, p, wavelength));
        return omega.transpose().cast<cplx>() * c.conjugate();
    }

    ChannelModel::ChannelModel(const Scenario &scenario, const BasisSet &basis)
        : scenario_(scenario), basis_(basis), wave_number_(2.0 * std::numbers::pi / scenario.wavelength())
    {
        const int U = scenario.num_ues();
        const int G = scenario.num_subcarriers();
        omega_.reserve(std::size_t(U));
        ax_.reserve(std::size_t(U));
        for (int u = 0; u < U; ++u)
        {
            const PathSet &ps = scenario.path_sets[std::size_t(u)];
            omega_.push_back(build_omega(basis, ps));
            const Eigen::VectorXcd a = rx_steering(ps, scenario.ue_positions.col(u), scenario.wavelength());
            Eigen::MatrixXcd ax(ps.num_paths(), G);
            for (int g = 0; g < G; ++g)
                ax.col(g) = a.cwiseProduct(path_gains(ps, scenario.subcarrier_frequencies[std::size_t(g)]));
            ax_.push_back(std::move(ax));
        }
    }

    ChannelTensor ChannelModel::tensor(const AntennaState &state, Scheme scheme) const
    {
        const int U = num_ues();
        const int M = num_antennas();
        const int G = num_subcarriers();
        if (state.positions.cols() != M || state.coefficients.cols() != M || state.coefficients.rows() != basis_size())
            throw ContractError("channel tensor: antenna state dimensions do not match the model");

        ChannelTensor t;
        t.scheme = scheme;
        t.per_subcarrier.assign(std::size_t(G), Eigen::MatrixXcd(U, M));
        for (int u = 0; u < U; ++u)
        {
            const PathSet &ps = scenario_.path_sets[std::size_t(u)];
            for (int m = 0; m < M; ++m)
            {
                Eigen::VectorXcd c = phase_vector(ps.k_tx, state.positions.col(m), scenario_.wavelength());
                c.array() *= (omega_[std::size_t(u)] * state.coefficients.col(m)).array().cast<cplx>();
                const Eigen::VectorXcd h = ax_[std::size_t(u)].transpose() * c; // one entry per subcarrier
                for (int g = 0; g < G; ++g)
                    t.per_subcarrier[std::size_t(g)](u, m) = h(g);
            }
        }
        return t;
    }

    ChannelTensor channel_tensor(const ChannelModel &model, const AntennaState &state, Scheme scheme)
    {
        check_state(model.scenario(), state, scheme);
        return model.tensor(state, scheme);
    }
}
