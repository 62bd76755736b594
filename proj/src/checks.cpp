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

#include "marasim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace marasim
{
    AntennaState random_state(const Scenario &scenario, int K, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int M = scenario.num_antennas();
        const double r = movement_radius(scenario.config);
        AntennaState s = initial_state(scenario, K);
        for (int m = 0; m < M; ++m)
        {
            Vec3 v(normal(rng), normal(rng), normal(rng));
            s.positions.col(m) += v.normalized() * (r * std::cbrt(unit(rng)));
            for (int k = 0; k < K; ++k)
                s.coefficients(k, m) = normal(rng);
            s.coefficients.col(m).normalize();
        }
        return s;
    }

    PrecoderSet random_precoders(const Scenario &scenario, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        PrecoderSet w;
        for (int g = 0; g < scenario.num_subcarriers(); ++g)
        {
            Eigen::MatrixXcd W(scenario.num_antennas(), scenario.num_ues());
            for (Eigen::Index i = 0; i < W.size(); ++i)
                W(i) = cplx(normal(rng), normal(rng));
            w.per_subcarrier.push_back(W);
        }
        const double scale = std::sqrt(scenario.config.total_power / w.total_power());
        for (auto &W : w.per_subcarrier)
            W *= scale;
        return w;
    }

    cplx direct_channel_coefficient(const Scenario &scenario, const BasisSet &basis, const AntennaState &state, int u,
                                    int m, int g)
    {
        const PathSet &ps = scenario.path_sets[std::size_t(u)];
        const double kappa = 2.0 * std::numbers::pi / scenario.wavelength();
        const double f = scenario.subcarrier_frequencies[std::size_t(g)];
        const Vec3 p = state.positions.col(m);
        const Vec3 q = scenario.ue_positions.col(u);
        const Eigen::VectorXd alpha = state.coefficients.col(m);
        cplx h = 0.0;
        for (int i = 0; i < ps.num_paths(); ++i)
        {
            const Vec3 k = ps.k_tx.col(i);
            const double theta = std::acos(std::clamp(k.z(), -1.0, 1.0));
            const double phi = std::atan2(k.y(), k.x());
            const double pattern = pattern_gain(basis, alpha, theta, phi);
            const cplx tx = std::polar(1.0, -kappa * k.dot(p));
            const cplx rx = std::polar(1.0, -kappa * Vec3(ps.k_rx.col(i)).dot(q));
            const cplx delay = std::polar(1.0, -2.0 * std::numbers::pi * ps.delays(i) * f);
            h += ps.gains(i) * pattern * tx * rx * delay;
        }
        return h;
    }

    Eigen::Matrix3Xd fd_gradient_positions(const ChannelModel &model, const AntennaState &state,
                                           const PrecoderSet &precoders, double fd_step)
    {
        const double h = fd_step * model.scenario().wavelength();
        Eigen::Matrix3Xd grad(3, model.num_antennas());
        for (int m = 0; m < model.num_antennas(); ++m)
            for (int c = 0; c < 3; ++c)
            {
                AntennaState plus = state, minus = state;
                plus.positions(c, m) += h;
                minus.positions(c, m) -= h;
                grad(c, m) = (objective(model, plus, precoders) - objective(model, minus, precoders)) / (2.0 * h);
            }
        return grad;
    }

    Eigen::MatrixXd fd_gradient_patterns(const ChannelModel &model, const AntennaState &state,
                                         const PrecoderSet &precoders, double fd_step)
    {
        Eigen::MatrixXd grad(model.basis_size(), model.num_antennas());
        for (int m = 0; m < model.num_antennas(); ++m)
            for (int k = 0; k < model.basis_size(); ++k)
            {
                AntennaState plus = state, minus = state;
                plus.coefficients(k, m) += fd_step;
                minus.coefficients(k, m) -= fd_step;
                grad(k, m) =
                    (objective(model, plus, precoders) - objective(model, minus, precoders)) / (2.0 * fd_step);
            }
        return grad;
    }

    namespace
    {
        CheckResult finish(std::string name, double worst, double tol, int cases)
        {
            CheckResult r;
            r.name = std::move(name);
            r.worst = worst;
            r.tolerance = tol;
            r.cases = cases;
            r.passed = std::isfinite(worst) && worst < tol;
            return r;
        }

        template <typename Fn>
        double over_instances(const CheckOptions &opts, Fn &&fn)
        {
            double worst = 0.0;
            for (int i = 0; i < opts.instances; ++i)
            {
                SystemConfig c = opts.config;
                c.seed = opts.seed + std::uint64_t(i);
                const Scenario sc = generate_scenario(c);
                const BasisSet basis(c.shod_max_degree);
                const ChannelModel model(sc, basis);
                std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
                const double e = fn(sc, basis, model, rng);
                worst = std::isnan(e) ? e : std::max(worst, e);
                if (std::isnan(worst))
                    break;
            }
            return worst;
        }
    }

    CheckResult check_orthonormality(const CheckOptions &opts)
    {
        double worst = 0.0;
        int cases = 0;
        for (int n = 0; n <= opts.config.shod_max_degree; ++n, ++cases)
        {
            const BasisSet basis(n);
            const Eigen::MatrixXd G = basis.gram();
            worst = std::max(worst, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
        }
        return finish("basis orthonormality", worst, 1e-8, cases);
    }

    CheckResult check_parseval(const CheckOptions &opts)
    {
        const BasisSet basis(opts.config.shod_max_degree);
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const int count = 10 * opts.instances;
        double worst = 0.0;
        for (int i = 0; i < count; ++i)
        {
            Eigen::VectorXd alpha(basis.size());
            for (int k = 0; k < basis.size(); ++k)
                alpha(k) = normal(rng);
            worst = std::max(worst, std::abs(pattern_power(basis, alpha) - alpha.squaredNorm()));
        }
        return finish("pattern power (Parseval)", worst, 1e-8, count);
    }

    CheckResult check_factorization(const CheckOptions &opts)
    {
        int cases = 0;
        const double worst = over_instances(opts, [&](const Scenario &sc, const BasisSet &basis, const ChannelModel &model,
                                                      std::mt19937_64 &rng)
        {
            const AntennaState s = random_state(sc, basis.size(), rng);
            double e = 0.0;
            for (int u = 0; u < sc.num_ues(); ++u)
                for (int m = 0; m < sc.num_antennas(); ++m)
                    for (int g = 0; g < sc.num_subcarriers(); ++g, ++cases)
                    {
                        const Eigen::VectorXcd q = ecsi(sc.path_sets[std::size_t(u)], model.omega(u), s.positions.col(m),
                                                        sc.ue_positions.col(u), sc.subcarrier_frequencies[std::size_t(g)],
                                                        sc.wavelength());
                        const cplx h = q.adjoint() * s.coefficients.col(m).cast<cplx>();
                        e = std::max(e, std::abs(h - direct_channel_coefficient(sc, basis, s, u, m, g)));
                    }
            return e;
        });
        return finish("eCSI factorization", worst, 1e-12, cases);
    }

    CheckResult check_se_equivalence(const CheckOptions &opts)
    {
        const double worst = over_instances(opts, [&](const Scenario &sc, const BasisSet &basis, const ChannelModel &model,
                                                      std::mt19937_64 &rng)
        {
            const AntennaState s = random_state(sc, basis.size(), rng);
            const PrecoderSet w = random_precoders(sc, rng);
            const double a = sum_se(model.tensor(s, Scheme::MARA), w, sc.config.noise_power).sum;
            const double b = sum_se_ecsi(model, s, w, sc.config.noise_power).sum;
            return std::abs(a - b);
        });
        return finish("SE channel/eCSI equivalence", worst, 1e-10, opts.instances);
    }

    namespace
    {
        double relative_error(const Eigen::MatrixXd &analytic, const Eigen::MatrixXd &numeric)
        {
            const double scale = std::max(numeric.norm(), analytic.norm());
            if (scale == 0.0)
                return 0.0;
            return (analytic - numeric).norm() / scale;
        }
    }

    CheckResult check_position_gradient(const CheckOptions &opts)
    {
        const double worst = over_instances(opts, [&](const Scenario &sc, const BasisSet &basis, const ChannelModel &model,
                                                      std::mt19937_64 &rng)
        {
            const AntennaState s = random_state(sc, basis.size(), rng);
            const PrecoderSet w = random_precoders(sc, rng);
            return relative_error(se_gradient_positions(model, s, w), fd_gradient_positions(model, s, w, opts.optim.fd_step));
        });
        return finish("position gradient vs finite differences", worst, 1e-5, opts.instances);
    }

    CheckResult check_pattern_gradient(const CheckOptions &opts)
    {
        const double worst = over_instances(opts, [&](const Scenario &sc, const BasisSet &basis, const ChannelModel &model,
                                                      std::mt19937_64 &rng)
        {
            const AntennaState s = random_state(sc, basis.size(), rng);
            const PrecoderSet w = random_precoders(sc, rng);
            return relative_error(se_gradient_patterns(model, s, w), fd_gradient_patterns(model, s, w, opts.optim.fd_step));
        });
        return finish("pattern gradient vs finite differences", worst, 1e-5, opts.instances);
    }

    CheckResult check_zf_nulling(const CheckOptions &opts)
    {
        double worst_power = 0.0;
        const double worst = over_instances(opts, [&](const Scenario &sc, const BasisSet &basis, const ChannelModel &model,
                                                      std::mt19937_64 &rng)
        {
            const AntennaState s = random_state(sc, basis.size(), rng);
            const ChannelTensor h = model.tensor(s, Scheme::MARA);
            const PrecoderSet w = digital_precoder(h, sc.config.total_power, sc.config.noise_power, PrecoderMethod::ZF);
            worst_power = std::max(worst_power, std::abs(w.total_power() - sc.config.total_power) / sc.config.total_power);
            double e = 0.0;
            for (int g = 0; g < h.num_subcarriers(); ++g)
            {
                const Eigen::MatrixXcd &H = h.per_subcarrier[std::size_t(g)];
                const Eigen::MatrixXcd &W = w.per_subcarrier[std::size_t(g)];
                for (int u = 0; u < H.rows(); ++u)
                    for (int v = 0; v < W.cols(); ++v)
                    {
                        const double nw = W.col(v).norm();
                        if (u == v || nw == 0.0)
                            continue;
                        e = std::max(e, std::abs((H.row(u) * W.col(v)).value()) / (H.row(u).norm() * nw));
                    }
            }
            return e;
        });
        CheckResult r = finish("zero-forcing nulling and power", worst, 1e-10, opts.instances);
        r.passed = r.passed && worst_power < 1e-9;
        return r;
    }

    std::vector<CheckResult> run_all_checks(const CheckOptions &opts)
    {
        return {check_orthonormality(opts),     check_parseval(opts),          check_factorization(opts),
                check_se_equivalence(opts),     check_position_gradient(opts), check_pattern_gradient(opts),
                check_zf_nulling(opts)};
    }
}

namespace marasim
{
    SystemConfig position_oracle_config(std::uint64_t seed)
    {
        SystemConfig c;
        c.num_bs_antennas = 1;
        c.num_ues = 1;
        c.num_paths_per_ue = 2;
        c.num_subcarriers = 2;
        c.shod_max_degree = 0;
        c.seed = seed;
        return c;
    }

    OracleCase position_oracle_case(std::uint64_t seed, double grid_step_fraction, const OptimOptions &opts)
    {
        const SystemConfig c = position_oracle_config(seed);
        const Scenario sc = generate_scenario(c);
        const BasisSet basis(c.shod_max_degree);
        const ChannelModel model(sc, basis);
        const AntennaState start = initial_state(sc, basis.size());
        const PrecoderSet w = digital_precoder(model.tensor(start, Scheme::TFA), c.total_power, c.noise_power,
                                               PrecoderMethod::ZF);

        OracleCase out;
        out.optimized = objective(model, optimize_positions(model, start, w, opts), w);
        out.reference =
            objective(model, brute_force_positions(model, start, w, grid_step_fraction * c.antenna_spacing()), w);
        return out;
    }

    SystemConfig pattern_oracle_config(std::uint64_t seed)
    {
        SystemConfig c;
        c.num_bs_antennas = 1;
        c.num_ues = 1;
        c.num_paths_per_ue = 4;
        c.num_subcarriers = 1;
        c.shod_max_degree = 2;
        c.seed = seed;
        return c;
    }

    OracleCase pattern_oracle_case(std::uint64_t seed, const OptimOptions &opts)
    {
        const SystemConfig c = pattern_oracle_config(seed);
        const Scenario sc = generate_scenario(c);
        const BasisSet basis(c.shod_max_degree);
        const ChannelModel model(sc, basis);
        const AntennaState start = initial_state(sc, basis.size());
        const PrecoderSet w = digital_precoder(model.tensor(start, Scheme::TFA), c.total_power, c.noise_power,
                                               PrecoderMethod::ZF);

        const Eigen::VectorXcd q = ecsi(sc.path_sets[0], model.omega(0), start.positions.col(0), sc.ue_positions.col(0),
                                        sc.subcarrier_frequencies[0], sc.wavelength());
        const Eigen::MatrixXd form = (q * q.adjoint()).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(form);
        AntennaState best = start;
        best.coefficients.col(0) = eig.eigenvectors().col(form.rows() - 1);

        OracleCase out;
        out.optimized = objective(model, optimize_patterns(model, start, w, Scheme::ERA, opts), w);
        out.reference = objective(model, best, w);
        return out;
    }
}
