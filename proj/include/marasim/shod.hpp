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

#ifndef MARASIM_SHOD_HPP
#define MARASIM_SHOD_HPP

#include "marasim/scenario.hpp"

#include <vector>

namespace marasim
{
    // Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) times a uniform
    // (trapezoidal) grid in phi. Weights already include the sin(theta) dtheta dphi measure.
    struct SphereQuadrature
    {
        Eigen::VectorXd theta;
        Eigen::VectorXd phi;
        Eigen::VectorXd weight;
        int size() const { return int(weight.size()); }
    };

    // Gauss-Legendre nodes/weights on [-1, 1]
    void gauss_legendre(int n, Eigen::VectorXd &nodes, Eigen::VectorXd &weights);

    // Real spherical harmonics up to degree N, orthonormal on the sphere:
    //   k = l^2 + l + m,  l = 0..N,  m = -l..l
    //   m > 0 : sqrt(2) N_lm P_l^m(cos theta) cos(m phi)
    //   m = 0 :         N_l0 P_l(cos theta)
    //   m < 0 : sqrt(2) N_l|m| P_l^|m|(cos theta) sin(|m| phi)
    // No Condon-Shortley phase, so Y_1,1 is proportional to x and Y_1,-1 to y.
    class BasisSet
    {
    public:
        explicit BasisSet(int max_degree);

        int max_degree() const { return max_degree_; }
        int size() const { return (max_degree_ + 1) * (max_degree_ + 1); } // K
        const SphereQuadrature &quadrature() const { return quad_; }

        static int index(int l, int m) { return l * l + l + m; }

        // omega(theta, phi) as a K-vector
        Eigen::VectorXd evaluate(double theta, double phi) const;

        // Gram matrix of the basis under the quadrature rule (identity for an exact rule)
        Eigen::MatrixXd gram() const;

    private:
        int max_degree_;
        SphereQuadrature quad_;
    };

    BasisSet build_basis(int max_degree);

    // f(theta, phi) = sum_k alpha_k omega_k(theta, phi)
    double pattern_gain(const BasisSet &basis, const Eigen::VectorXd &alpha, double theta, double phi);

    // Quadrature value of  integral |f|^2 sin(theta) dtheta dphi
    double pattern_power(const BasisSet &basis, const Eigen::VectorXd &alpha);

    // (theta, phi) of a unit direction, theta in [0, pi], phi in [0, 2 pi)
    std::pair<double, double> direction_angles(const Vec3 &k);

    // L x K matrix, row i = omega at the departure angles of path i
    Eigen::MatrixXd build_omega(const BasisSet &basis, const PathSet &path_set);

    // Coefficients of the isotropic pattern f = 1/sqrt(4 pi), i.e. (1, 0, ..., 0)
    Eigen::VectorXd isotropic_coefficients(int K);
}

#endif
