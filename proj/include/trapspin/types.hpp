// Copyright 2026 The trapspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "trapspin/errors.hpp"

namespace trapspin {

/// Cartesian trap axes. The chain axis is always `Z`; a planar crystal lies in
/// the x-z plane with `Y` as its transverse axis.
enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAllAxes{Axis::X, Axis::Y, Axis::Z};

inline constexpr std::size_t index(Axis a) { return static_cast<std::size_t>(a); }

inline constexpr char axis_name(Axis a) { return "xyz"[index(a)]; }

inline Axis parse_axis(std::string_view s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw InvalidArgument("unknown axis '" + std::string(s) + "'");
}

/// A value per Cartesian axis.
template <typename T>
struct PerAxis {
    std::array<T, 3> values{};

    T &operator[](Axis a) { return values[index(a)]; }
    const T &operator[](Axis a) const { return values[index(a)]; }

    bool operator==(const PerAxis &) const = default;
};

/// Trap frequencies (omega_x, omega_y, omega_z) in units of omega_z.
struct TrapFrequencies {
    double x = 1.0;
    double y = 1.0;
    double z = 1.0;

    double operator[](Axis a) const {
        switch (a) {
            case Axis::X:
                return x;
            case Axis::Y:
                return y;
            case Axis::Z:
                return z;
        }
        return z;
    }

    void validate() const {
        if (!(x > 0) || !(y > 0) || !(z > 0)) {
            throw InvalidArgument("trap frequencies must be positive");
        }
    }

    bool operator==(const TrapFrequencies &) const = default;
};

namespace units {

// Natural units: hbar = m = e^2/(4 pi eps0) = omega_z = 1. Lengths are in
// l = (e^2 / (m omega_z^2))^(1/3), energies in hbar*omega_z, forces in
// hbar*omega_z / l.

/// Converts an energy in units of hbar*omega_z into a frequency in the units
/// `omega_z_value` is given in (e.g. omega_z = 10 MHz -> result in MHz).
inline double energy_to_frequency(double energy, double omega_z_value) { return energy * omega_z_value; }

}  // namespace units

}  // namespace trapspin
