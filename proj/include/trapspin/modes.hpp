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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

struct ElasticityMatrix {
    Axis axis = Axis::Z;
    /// K^alpha in units of omega_z^2.
    Eigen::MatrixXd entries;
    /// +1 transverse to the inter-ion separation, -2 along it.
    double c_alpha = 1.0;
};

struct ModeData {
    Axis axis = Axis::Z;
    /// Ascending, units of omega_z.
    Eigen::VectorXd frequencies;
    /// Column n is the displacement pattern of mode n.
    Eigen::MatrixXd mode_matrix;
    /// Number of modes whose squared frequency was clamped to zero.
    int zero_modes = 0;

    std::size_t size() const { return static_cast<std::size_t>(frequencies.size()); }
};

struct BetaParam {
    Axis axis = Axis::Z;
    double value = 0.0;
    double d0_used = 0.0;
};

inline constexpr double kNegativeCurvatureTolerance = 1e-12;
inline constexpr double kZeroModeTolerance = 1e-12;

/// Geometry constant c_alpha for a crystal and axis. Chains lie along z; for a
/// planar crystal only the transverse (y) axis decouples at harmonic order.
inline double geometry_constant(const IonCrystal &crystal, Axis axis) {
    if (crystal.config.geometry == Geometry::HexLattice) {
        if (axis != Axis::Y) {
            throw InvalidArgument("hex lattice: only the transverse axis y is supported");
        }
        return 1.0;
    }
    return axis == Axis::Z ? -2.0 : 1.0;
}

inline ElasticityMatrix elasticity_matrix(const IonCrystal &crystal, Axis axis, const TrapFrequencies &freqs) {
    const auto n = static_cast<Eigen::Index>(crystal.size());
    if (n < 1) throw InvalidArgument("elasticity_matrix: empty crystal");
    freqs.validate();

    ElasticityMatrix k;
    k.axis = axis;
    k.c_alpha = geometry_constant(crystal, axis);
    const double w = freqs[axis];
    k.entries = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k.entries(i, i) = w * w;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double r = (crystal.positions[i] - crystal.positions[j]).norm();
            if (!(r > 1e-12)) {
                throw InvalidGeometry("elasticity_matrix: ions " + std::to_string(i) + " and " + std::to_string(j) +
                                      " coincide");
            }
            const double coulomb = k.c_alpha / (r * r * r);
            k.entries(i, i) -= coulomb;
            k.entries(i, j) = coulomb;
        }
    }
    return k;
}

/// Diagonalizes K. Columns are sign-fixed so the largest-magnitude component
/// is positive (first index wins ties).
inline ModeData normal_modes(const ElasticityMatrix &k) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.entries);
    if (solver.info() != Eigen::Success) throw Error("normal_modes: eigensolver failed");

    ModeData m;
    m.axis = k.axis;
    const auto n = k.entries.rows();
    m.frequencies.resize(n);
    m.mode_matrix = solver.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) {
        double w2 = solver.eigenvalues()[i];
        if (w2 < -kNegativeCurvatureTolerance) {
            throw InstabilityError(std::string("crystal unstable along axis ") + axis_name(k.axis) +
                                       " (squared mode frequency " + std::to_string(w2) + ")",
                                   w2);
        }
        if (std::abs(w2) < kZeroModeTolerance) {
            w2 = 0.0;
            ++m.zero_modes;
        }
        m.frequencies[i] = std::sqrt(w2);

        auto col = m.mode_matrix.col(i);
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < n; ++r) {
            if (std::abs(col[r]) > std::abs(col[best]) + 1e-12) best = r;
        }
        if (col[best] < 0) col = -col;
    }
    return m;
}

/// Stiffness ratio beta = |c| / (omega_alpha^2 d0^3). d0 is the central
/// nearest-neighbour spacing for Paul chains and the lattice constant otherwise.
inline BetaParam beta(const IonCrystal &crystal, Axis axis, const TrapFrequencies &freqs) {
    if (crystal.size() < 2) throw InvalidArgument("beta: need at least 2 ions");
    freqs.validate();
    BetaParam b;
    b.axis = axis;
    b.d0_used = crystal.config.geometry == Geometry::PaulChain ? central_spacing(crystal) : crystal.config.spacing;
    const double w = freqs[axis];
    b.value = std::abs(geometry_constant(crystal, axis)) / (w * w * std::pow(b.d0_used, 3));
    return b;
}

/// Trap frequency along `axis` that produces the stiffness ratio `target`.
inline double frequency_for_beta(const IonCrystal &crystal, Axis axis, double target) {
    if (!(target > 0)) throw InvalidArgument("frequency_for_beta: beta must be positive");
    TrapFrequencies unit;
    const double b1 = beta(crystal, axis, unit).value;
    return std::sqrt(b1 / target);
}

}  // namespace trapspin
