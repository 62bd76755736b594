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

#include "marasim/shod.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace marasim
{
    void gauss_legendre(int n, Eigen::VectorXd &nodes, Eigen::VectorXd &weights)
    {
        if (n < 1)
            throw ContractError("gauss_legendre: n >= 1 required");
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i)
        {
            // Newton iteration on P_n from the Tricomi initial guess
            double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
            double dp = 1.0;
            for (int iter = 0; iter < 100; ++iter)
            {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    double pk = (double(2 * k - 1) * x * p1 - double(k - 1) * p0) / double(k);
                    p0 = p1;
                    p1 = pk;
                }
                double pn = (n == 1) ? x : p1;
                double pn1 = (n == 1) ? 1.0 : p0;
                dp = double(n) * (x * pn - pn1) / (x * x - 1.0);
                double dx = pn / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            // recompute derivative at the converged node
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                double pk = (double(2 * k - 1) * x * p1 - double(k - 1) * p0) / double(k);
                p0 = p1;
                p1 = pk;
            }
            double pn = (n == 1) ? x : p1;
            double pn1 = (n == 1) ? 1.0 : p0;
            dp = double(n) * (x * pn - pn1) / (x * x - 1.0);

            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes(i) = x;
            nodes(n - 1 - i) = -x;
            weights(i) = w;
            weights(n - 1 - i) = w;
        }
        if (n % 2 == 1)
            nodes(n / 2) = 0.0;
    }

    BasisSet::BasisSet(int max_degree) : max_degree_(max_degree)
    {
        if (max_degree < 0)
            throw ContractError("build_basis: max_degree >= 0 required");

        // Exact for all products of two harmonics of degree <= N
        const int n_theta = 2 * (max_degree + 1);
        const int n_phi = 2 * (2 * max_degree + 1);

        Eigen::VectorXd x, wx;
        gauss_legendre(n_theta, x, wx);

        quad_.theta.resize(n_theta * n_phi);
        quad_.phi.resize(n_theta * n_phi);
        quad_.weight.resize(n_theta * n_phi);
        const double dphi = 2.0 * std::numbers::pi / double(n_phi);
        int q = 0;
        for (int i = 0; i < n_theta; ++i)
            for (int j = 0; j < n_phi; ++j, ++q)
            {
                quad_.theta(q) = std::acos(x(i));
                quad_.phi(q) = dphi * double(j);
                quad_.weight(q) = wx(i) * dphi;
            }
    }

    Eigen::VectorXd BasisSet::evaluate(double theta, double phi) const
    {
        const int N = max_degree_;
        Eigen::VectorXd out(size());
        for (int l = 0; l <= N; ++l)
        {
            out(index(l, 0)) = std::sph_legendre(unsigned(l), 0u, theta);
            for (int m = 1; m <= l; ++m)
            {
                // std::sph_legendre includes (-1)^m; strip it
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                const double a = sign * std::numbers::sqrt2 * std::sph_legendre(unsigned(l), unsigned(m), theta);
                out(index(l, m)) = a * std::cos(double(m) * phi);
                out(index(l, -m)) = a * std::sin(double(m) * phi);
            }
        }
        return out;
    }

    Eigen::MatrixXd BasisSet::gram() const
    {
        const int K = size();
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, K);
        for (int q = 0; q < quad_.size(); ++q)
        {
            Eigen::VectorXd w = evaluate(quad_.theta(q), quad_.phi(q));
            G.noalias() += quad_.weight(q) * w * w.transpose();
        }
        return G;
    }

    BasisSet build_basis(int max_degree) { return BasisSet(max_degree); }

    double pattern_gain(const BasisSet &basis, const Eigen::VectorXd &alpha, double theta, double phi)
    {
        if (alpha.size() != basis.size())
            throw ContractError("pattern_gain: coefficient vector has " + std::to_string(alpha.size()) +
                                " entries, basis has " + std::to_string(basis.size()));
        return basis.evaluate(theta, phi).dot(alpha);
    }

    double pattern_power(const BasisSet &basis, const Eigen::VectorXd &alpha)
    {
        if (alpha.size() != basis.size())
            throw ContractError("pattern_power: coefficient vector has " + std::to_string(alpha.size()) +
                                " entries, basis has " + std::to_string(basis.size()));
        const auto &quad = basis.quadrature();
        double power = 0.0;
        for (int q = 0; q < quad.size(); ++q)
        {
            const double f = basis.evaluate(quad.theta(q), quad.phi(q)).dot(alpha);
            power += quad.weight(q) * f * f;
        }
        return power;
    }

    std::pair<double, double> direction_angles(const Vec3 &k)
    {
        const double theta = std::acos(std::clamp(k.z(), -1.0, 1.0));
        double phi = std::atan2(k.y(), k.x());
        if (phi < 0.0)
            phi += 2.0 * std::numbers::pi;
        if (phi >= 2.0 * std::numbers::pi)
            phi = 0.0;
        return {theta, phi};
    }

    Eigen::MatrixXd build_omega(const BasisSet &basis, const PathSet &path_set)
    {
        const int L = path_set.num_paths();
        Eigen::MatrixXd omega(L, basis.size());
        for (int i = 0; i < L; ++i)
        {
            const auto [theta, phi] = direction_angles(path_set.k_tx.col(i));
            omega.row(i) = basis.evaluate(theta, phi).transpose();
        }
        return omega;
    }

    Eigen::VectorXd isotropic_coefficients(int K)
    {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
        a(0) = 1.0;
        return a;
    }
}
