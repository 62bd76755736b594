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

#ifndef MARASIM_TYPES_HPP
#define MARASIM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace marasim
{
    using cplx = std::complex<double>;
    using Vec3 = Eigen::Vector3d;

    inline constexpr double speed_of_light = 299792458.0; // [m/s]

    // Antenna schemes, ordered by the freedom they expose.
    //   TFA  - fixed position, fixed isotropic pattern
    //   SMA  - movable position, fixed isotropic pattern
    //   ERA  - fixed position, reconfigurable pattern
    //   MARA - movable position and reconfigurable pattern
    enum class Scheme
    {
        TFA,
        SMA,
        ERA,
        MARA
    };

    inline constexpr bool moves_positions(Scheme s) { return s == Scheme::SMA || s == Scheme::MARA; }
    inline constexpr bool shapes_patterns(Scheme s) { return s == Scheme::ERA || s == Scheme::MARA; }

    std::string_view to_string(Scheme s);
    Scheme scheme_from_string(std::string_view name); // throws ConfigError on unknown names

    // Error hierarchy. Everything thrown by the library derives from Error.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Malformed input file or unknown key
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    // Well-formed input that violates an invariant; field() names the offending key
    class ValidationError : public Error
    {
    public:
        ValidationError(std::string field, const std::string &what)
            : Error(field + ": " + what), field_(std::move(field)) {}
        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    // API misuse: dimension mismatch, bad index, scheme/state mismatch
    class ContractError : public Error
    {
    public:
        using Error::Error;
    };

    // Rank-deficient channel under zero-forcing
    class SingularityError : public Error
    {
    public:
        SingularityError(int subcarrier, const std::string &what)
            : Error(what), subcarrier_(subcarrier) {}
        int subcarrier() const noexcept { return subcarrier_; }

    private:
        int subcarrier_;
    };

    // Brute-force search too large
    class SizeError : public Error
    {
    public:
        using Error::Error;
    };

    class FileError : public Error
    {
    public:
        using Error::Error;
    };
}

#endif
