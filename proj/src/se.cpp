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

#include "marasim/se.hpp"

#include <cmath>
#include <string>

namespace marasim
{
    double PrecoderSet::total_power() const
    {
        double p = 0.0;
        for (const auto &W : per_subcarrier)
            p += W.squaredNorm();
        return p;
    }

    namespace
    {
        void check_shapes(const ChannelTensor &channel, const PrecoderSet &precoders)
        {
            if (precoders.num_subcarriers() != channel.num_subcarriers())
                throw ContractError("precoder set has " + std::to_string(precoders.num_subcarriers()) +
                                    " subcarriers, channel has " + std::to_string(channel.num_subcarriers()));
            for (const auto &W : precoders.per_subcarrier)
                if (W.rows() != channel.num_antennas() || W.cols() != channel.num_ues())
                    throw ContractError("precoder matrix must be M x U");
        }

        // Row u of Z = H W holds h_{u,g} w_{v,g} for every v
        double sinr_from_row(const Eigen::RowVectorXcd &z, int u, double noise_power)
        {
            double interference = 0.0;
            for (Eigen::Index v = 0; v < z.size(); ++v)
                if (v != u)
                    interference += std::norm(z(v));
            return std::norm(z(u)) / (interference + noise_power);
        }
    }

    double sinr(const ChannelTensor &channel, const PrecoderSet &precoders, int u, int g, double noise_power)
    {
        if (u < 0 || u >= channel.num_ues() || g < 0 || g >= channel.num_subcarriers())
            throw ContractError("sinr: index (u=" + std::to_string(u) + ", g=" + std::to_string(g) + ") out of range");
        check_shapes(channel, precoders);
        const Eigen::RowVectorXcd z = channel.per_subcarrier[std::size_t(g)].row(u) * precoders.per_subcarrier[std::size_t(g)];
        return sinr_from_row(z, u, noise_power);
    }

    SeReport sum_se(const ChannelTensor &channel, const PrecoderSet &precoders, double noise_power)
    {
        check_shapes(channel, precoders);
        SeReport r;
        const int G = channel.num_subcarriers();
        for (int g = 0; g < G; ++g)
        {
            const Eigen::MatrixXcd Z = channel.per_subcarrier[std::size_t(g)] * precoders.per_subcarrier[std::size_t(g)];
            for (int u = 0; u < Z.rows(); ++u)
                r.sum += std::log2(1.0 + sinr_from_row(Z.row(u), u, noise_power));
        }
        r.per_subcarrier = G > 0 ? r.sum / double(G) : 0.0;
        return r;
    }

    SeReport sum_se_ecsi(const ChannelModel &model, const AntennaState &state, const PrecoderSet &precoders,
                         double noise_power)
    {
        const Scenario &sc = model.scenario();
        const int U = model.num_ues();
        const int M = model.num_antennas();
        const int G = model.num_subcarriers();
        const int K = model.basis_size();

        // Lambda = blkdiag(alpha_1, ..., alpha_M), MK x M
        Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(M * K, M);
        for (int m = 0; m < M; ++m)
            lambda.block(m * K, m, K, 1) = state.coefficients.col(m);

        SeReport r;
        for (int g = 0; g < G; ++g)
        {
            const Eigen::MatrixXcd &W = precoders.per_subcarrier[std::size_t(g)];
            const Eigen::MatrixXcd lw = lambda.cast<cplx>() * W; // MK x U
            for (int u = 0; u < U; ++u)
            {
                Eigen::VectorXcd q(M * K);
                for (int m = 0; m < M; ++m)
                    q.segment(m * K, K) = ecsi(sc.path_sets[std::size_t(u)], model.omega(u), state.positions.col(m),
                                               sc.ue_positions.col(u), sc.subcarrier_frequencies[std::size_t(g)],
                                               sc.wavelength());
                const Eigen::RowVectorXcd z = q.adjoint() * lw;
                r.sum += std::log2(1.0 + sinr_from_row(z, u, noise_power));
            }
        }
        r.per_subcarrier = G > 0 ? r.sum / double(G) : 0.0;
        return r;
    }
}
