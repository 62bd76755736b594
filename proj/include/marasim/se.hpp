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

#ifndef MARASIM_SE_HPP
#define MARASIM_SE_HPP

#include "marasim/channel.hpp"

#include <vector>

namespace marasim
{
    // Digital precoders, one M x U matrix per subcarrier; column u serves UE u.
    struct PrecoderSet
    {
        std::vector<Eigen::MatrixXcd> per_subcarrier;

        int num_subcarriers() const { return int(per_subcarrier.size()); }
        double total_power() const; // sum_g ||W_g||_F^2
    };

    struct SeReport
    {
        double sum = 0.0;            // sum over subcarriers and UEs [bit/s/Hz]
        double per_subcarrier = 0.0; // sum / G
    };

    // |h_{u,g} w_{u,g}|^2 / (sum_{u' != u} |h_{u,g} w_{u',g}|^2 + noise)
    // The interference uses the intended UE's channel against the other UEs' precoders.
    double sinr(const ChannelTensor &channel, const PrecoderSet &precoders, int u, int g, double noise_power);

    // sum_g sum_u log2(1 + SINR)
    SeReport sum_se(const ChannelTensor &channel, const PrecoderSet &precoders, double noise_power);

    // Same objective evaluated from the eCSI route: q_{u,g}^H Lambda w with the composite
    // eCSI vector q_{u,g} in C^{MK} and Lambda = blkdiag(alpha_1, ..., alpha_M).
    // Does not go through ChannelTensor.
    SeReport sum_se_ecsi(const ChannelModel &model, const AntennaState &state, const PrecoderSet &precoders,
                         double noise_power);
}

#endif
