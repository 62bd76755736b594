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

#ifndef MARASIM_OPTIM_HPP
#define MARASIM_OPTIM_HPP

#include "marasim/se.hpp"

#include <cstdint>
#include <vector>

namespace marasim
{
    enum class PrecoderMethod
    {
        ZF,  // zero-forcing with water-filling over all (subcarrier, UE) streams
        MRT  // matched filter, equal power per stream
    };

    struct OptimOptions
    {
        int max_outer_iters = 50;
        int inner_grad_iters = 100;
        double step_init_position = 1e-2; // fraction of the antenna spacing d
        double step_init_pattern = 1e-1;
        double armijo_c = 1e-4;
        double backtrack_ratio = 0.5;
        double tol_rel = 1e-6;
        double fd_step = 1e-6; // finite-difference step: fraction of lambda for positions, absolute for patterns
        int restarts = 4;
        std::uint64_t seed = 0;
        PrecoderMethod precoder = PrecoderMethod::ZF;
    };

    // Throws ValidationError for non-positive values or backtrack_ratio outside (0, 1).
    void validate(const OptimOptions &opts);

    // Names accepted by apply_override(OptimOptions&, ...)
    const std::vector<std::string> &optim_option_keys();
    void apply_override(OptimOptions &opts, const std::string &key, const std::string &value);

    struct OptimResult
    {
        Scheme scheme = Scheme::TFA;
        AntennaState state;
        PrecoderSet precoders;
        std::vector<double> se_trace; // objective after each outer iteration
        int iterations = 0;
        bool converged = false;
        double wall_time = 0.0; // [s], this scheme's own solve, excluding its warm-start chain

        double se() const { return se_trace.empty() ? 0.0 : se_trace.back(); }
    };

    // Water-filling over parallel channels with power cost costs[i] per unit received SNR
    // numerator: spends e_i = max(0, mu - costs[i] * noise) with sum e_i = total_power.
    // The water level mu is found by bisection.
    std::vector<double> water_filling(const std::vector<double> &costs, double noise_power, double total_power);

    // Zero-forcing directions X_g = H_g^H (H_g H_g^H)^-1, stream costs [(H_g H_g^H)^-1]_uu
    // (index g * U + u), water-filled powers and the resulting precoders.
    struct ZfSolution
    {
        std::vector<Eigen::MatrixXcd> directions;
        std::vector<Eigen::MatrixXcd> gram_inverse;
        std::vector<double> costs;
        std::vector<double> spent;
        PrecoderSet precoders;
    };

    ZfSolution zero_forcing(const ChannelTensor &channel, double total_power, double noise_power);

    // Per-subcarrier digital precoders meeting sum_g ||W_g||_F^2 = P_T.
    // ZF throws SingularityError when some H_g is rank deficient.
    PrecoderSet digital_precoder(const ChannelTensor &channel, double total_power, double noise_power,
                                 PrecoderMethod method);

    // Sum SE of a state under fixed precoders; no scheme checks.
    double objective(const ChannelModel &model, const AntennaState &state, const PrecoderSet &precoders);

    // Sum SE with ZF precoders re-derived for the state; -inf when some H_g is rank deficient
    double zf_objective(const ChannelModel &model, const AntennaState &state);

    // Analytic gradient of the sum SE with respect to every antenna position (3 x M)
    Eigen::Matrix3Xd se_gradient_positions(const ChannelModel &model, const AntennaState &state,
                                           const PrecoderSet &precoders);
    Vec3 se_gradient_positions(const ChannelModel &model, const AntennaState &state, const PrecoderSet &precoders,
                               int m);

    // Euclidean gradient of the sum SE with respect to every coefficient vector (K x M)
    Eigen::MatrixXd se_gradient_patterns(const ChannelModel &model, const AntennaState &state,
                                         const PrecoderSet &precoders);
    Eigen::VectorXd se_gradient_patterns(const ChannelModel &model, const AntennaState &state,
                                         const PrecoderSet &precoders, int m);

    // Gradients of zf_objective. The water-filled powers are optimal for the ZF stream
    // costs, so they are held fixed and only the costs are differentiated.
    Eigen::Matrix3Xd zf_gradient_positions(const ChannelModel &model, const AntennaState &state);
    Eigen::MatrixXd zf_gradient_patterns(const ChannelModel &model, const AntennaState &state);

    // (I - alpha alpha^T) grad, column-wise
    Eigen::MatrixXd tangent_component(const Eigen::MatrixXd &coefficients, const Eigen::MatrixXd &gradient);

    // Projected gradient ascent over all positions with Armijo backtracking, precoders fixed.
    // Best of opts.restarts starts; the first start is the incoming state (projected).
    AntennaState optimize_positions(const ChannelModel &model, const AntennaState &state,
                                    const PrecoderSet &precoders, const OptimOptions &opts);

    // Sphere-retracted gradient ascent over all coefficient vectors, precoders fixed.
    // Throws ContractError for TFA and SMA, whose patterns are pinned.
    AntennaState optimize_patterns(const ChannelModel &model, const AntennaState &state,
                                   const PrecoderSet &precoders, Scheme scheme, const OptimOptions &opts);

    // Same ascent on zf_objective, precoders re-derived for every candidate
    AntennaState optimize_positions_zf(const ChannelModel &model, const AntennaState &state, const OptimOptions &opts);
    AntennaState optimize_patterns_zf(const ChannelModel &model, const AntennaState &state, Scheme scheme,
                                      const OptimOptions &opts);

    // Block-coordinate ascent from a given start: positions (if allowed), precoders, patterns
    // (if allowed), precoders; repeated until the relative gain drops below tol_rel.
    // With ZF the position and pattern blocks ascend zf_objective; with MRT they run with the
    // precoders fixed. Any update is accepted only when it does not lower the objective.
    OptimResult optimize_from(const ChannelModel &model, Scheme scheme, const AntennaState &start,
                              const PrecoderSet &start_precoders, const OptimOptions &opts);

    // TFA: one precoder step at the initial state
    OptimResult optimize_tfa(const ChannelModel &model, const OptimOptions &opts);

    // Full solve for one scheme with the nesting warm starts:
    // SMA and ERA start from the TFA solution; MARA starts from the better of SMA and ERA.
    OptimResult alternating_optimize(const ChannelModel &model, Scheme scheme, const OptimOptions &opts);

    // Solves every requested scheme, sharing the warm-start chain. Results follow `schemes` order.
    std::vector<OptimResult> optimize_schemes(const ChannelModel &model, const std::vector<Scheme> &schemes,
                                              const OptimOptions &opts);

    struct BruteForceOptions
    {
        bool rederive_precoders = false;
        PrecoderMethod precoder = PrecoderMethod::ZF;
        long long max_evaluations = 10'000'000;
    };

    // Number of points of a cubic grid with the given step that fall into one movement ball
    long long grid_points_per_ball(const SystemConfig &config, double grid_step);

    // Exhaustive coordinate-wise search: antenna 0 over its grid, then antenna 1, ...
    // Only strict improvements are taken, so ties keep the lowest grid index.
    AntennaState brute_force_positions(const ChannelModel &model, const AntennaState &state,
                                       const PrecoderSet &precoders, double grid_step,
                                       const BruteForceOptions &options = {});
}

#endif
