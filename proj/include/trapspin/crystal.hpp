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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trapspin/errors.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

enum class Geometry { MicrotrapChain, PaulChain, HexLattice };

inline std::string geometry_name(Geometry g) {
    switch (g) {
        case Geometry::MicrotrapChain:
            return "microtrap_chain";
        case Geometry::PaulChain:
            return "paul_chain";
        case Geometry::HexLattice:
            return "hex_lattice";
    }
    return "?";
}

inline Geometry parse_geometry(const std::string &s) {
    if (s == "microtrap_chain") return Geometry::MicrotrapChain;
    if (s == "paul_chain") return Geometry::PaulChain;
    if (s == "hex_lattice") return Geometry::HexLattice;
    throw InvalidArgument("unknown geometry '" + s + "'");
}

/// Number of ions in a hexagonal patch with `shells` rings around the center.
inline int hex_ion_count(int shells) { return 1 + 3 * shells * (shells + 1); }

/// Inverse of `hex_ion_count`; returns -1 when `n` is not a closed-shell count.
inline int hex_shells_for(int n) {
    for (int s = 0; hex_ion_count(s) <= n; ++s) {
        if (hex_ion_count(s) == n) return s;
    }
    return -1;
}

struct TrapConfig {
    Geometry geometry = Geometry::PaulChain;
    int n_ions = 1;
    TrapFrequencies trap_freqs;
    /// Lattice constant d0; used by MicrotrapChain and HexLattice only.
    double spacing = 1.0;

    void validate() const {
        if (n_ions < 1) throw InvalidArgument("n_ions must be >= 1");
        trap_freqs.validate();
        if (geometry != Geometry::PaulChain && !(spacing > 0)) {
            throw InvalidArgument("spacing must be positive");
        }
        if (geometry == Geometry::HexLattice && hex_shells_for(n_ions) < 0) {
            throw InvalidArgument("hex_lattice n_ions must be a closed-shell count (1, 7, 19, ...)");
        }
    }
};

/// Equilibrium ion positions in natural length units.
struct IonCrystal {
    std::vector<Eigen::Vector3d> positions;
    TrapConfig config;
    /// Max-norm of the potential gradient at `positions` (Paul chains), 0 otherwise.
    double residual = 0.0;
    int iterations = 0;

    std::size_t size() const { return positions.size(); }
};

inline IonCrystal make_microtrap_chain(int n, double d0) {
    if (n < 1) throw InvalidArgument("make_microtrap_chain: n must be >= 1");
    if (!(d0 > 0)) throw InvalidArgument("make_microtrap_chain: d0 must be positive");
    IonCrystal c;
    c.config.geometry = Geometry::MicrotrapChain;
    c.config.n_ions = n;
    c.config.spacing = d0;
    const double center = 0.5 * (n - 1);
    for (int i = 0; i < n; ++i) {
        c.positions.emplace_back(0.0, 0.0, (i - center) * d0);
    }
    return c;
}

/// Ideal triangular lattice in the x-z plane, nearest-neighbour distance d0.
/// Points are ordered by (z, x).
inline IonCrystal make_hex_lattice(int shells, double d0) {
    if (shells < 0) throw InvalidArgument("make_hex_lattice: shells must be >= 0");
    if (!(d0 > 0)) throw InvalidArgument("make_hex_lattice: d0 must be positive");
    IonCrystal c;
    c.config.geometry = Geometry::HexLattice;
    c.config.n_ions = hex_ion_count(shells);
    c.config.spacing = d0;
    const double h = std::sqrt(3.0) / 2.0;
    for (int r = -shells; r <= shells; ++r) {
        for (int q = -shells; q <= shells; ++q) {
            if (std::abs(q + r) > shells) continue;
            c.positions.emplace_back(d0 * (q + 0.5 * r), 0.0, d0 * h * r);
        }
    }
    std::sort(c.positions.begin(), c.positions.end(), [](const auto &a, const auto &b) {
        return a.z() != b.z() ? a.z() < b.z() : a.x() < b.x();
    });
    return c;
}

namespace detail {

inline void require_paul_chain(const IonCrystal &c, const char *who) {
    if (c.config.geometry != Geometry::PaulChain) {
        throw InvalidArgument(std::string(who) + ": requires a Paul chain crystal");
    }
}

inline Eigen::VectorXd chain_coordinates(const IonCrystal &c) {
    Eigen::VectorXd u(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) u[i] = c.positions[i].z();
    return u;
}

// Axial potential of an ordered chain: sum u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|.
inline double chain_potential(const Eigen::VectorXd &u) {
    const auto n = u.size();
    double v = 0.5 * u.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) v += 1.0 / std::abs(u[i] - u[j]);
    }
    return v;
}

inline Eigen::VectorXd chain_gradient(const Eigen::VectorXd &u) {
    const auto n = u.size();
    Eigen::VectorXd g = u;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = u[i] - u[j];
            g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    }
    return g;
}

inline Eigen::MatrixXd chain_hessian(const Eigen::VectorXd &u) {
    const auto n = u.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double k = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            h(i, i) += k;
            h(i, j) -= k;
        }
    }
    return h;
}

inline bool strictly_increasing(const Eigen::VectorXd &u) {
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (!(u[i] > u[i - 1])) return false;
    }
    return true;
}

}  // namespace detail

/// Total trap + Coulomb potential of a Paul chain, natural units.
inline double potential_energy(const IonCrystal &crystal) {
    detail::require_paul_chain(crystal, "potential_energy");
    return detail::chain_potential(detail::chain_coordinates(crystal));
}

/// Gradient of the trap + Coulomb potential with respect to the axial
/// coordinate of each ion.
inline Eigen::VectorXd potential_gradient(const IonCrystal &crystal) {
    detail::require_paul_chain(crystal, "potential_gradient");
    return detail::chain_gradient(detail::chain_coordinates(crystal));
}

/// Axial equilibrium of n ions in a harmonic trap by damped Newton iteration.
///
/// The ordered-chain potential is strictly convex, so Newton steps on the
/// Hessian are descent directions; each step is halved until the potential
/// (or, near round-off, the gradient norm) decreases and the ordering holds.
inline IonCrystal solve_paul_chain_equilibrium(int n, double tol = 1e-12, int max_iter = 200) {
    if (n < 1) throw InvalidArgument("solve_paul_chain_equilibrium: n must be >= 1");
    if (!(tol > 0)) throw InvalidArgument("solve_paul_chain_equilibrium: tol must be positive");

    IonCrystal c;
    c.config.geometry = Geometry::PaulChain;
    c.config.n_ions = n;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    if (n > 1) {
        const double length = std::pow(static_cast<double>(n), 0.6);
        for (int i = 0; i < n; ++i) u[i] = length * (static_cast<double>(i) / (n - 1) - 0.5);
    }

    Eigen::VectorXd g = detail::chain_gradient(u);
    double residual = g.lpNorm<Eigen::Infinity>();
    int iter = 0;
    while (residual >= tol) {
        if (iter >= max_iter) {
            throw ConvergenceFailure("Paul chain equilibrium did not converge (n=" + std::to_string(n) +
                                         ", residual=" + std::to_string(residual) + ")",
                                     residual);
        }
        ++iter;
        const Eigen::VectorXd step = detail::chain_hessian(u).llt().solve(-g);
        const double v0 = detail::chain_potential(u);
        double scale = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, scale *= 0.5) {
            Eigen::VectorXd trial = u + scale * step;
            if (!detail::strictly_increasing(trial)) continue;
            const Eigen::VectorXd gt = detail::chain_gradient(trial);
            const double rt = gt.lpNorm<Eigen::Infinity>();
            if (detail::chain_potential(trial) < v0 || rt < residual) {
                u = std::move(trial);
                g = gt;
                residual = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Rounding the coordinates alone moves the gradient by about
            // eps * |u| * |H|; below that no step can make progress.
            const double floor = 8.0 * std::numeric_limits<double>::epsilon() * u.lpNorm<Eigen::Infinity>() *
                                 detail::chain_hessian(u).diagonal().maxCoeff();
            if (residual <= floor) break;
            throw ConvergenceFailure("Paul chain equilibrium stalled (n=" + std::to_string(n) +
                                         ", residual=" + std::to_string(residual) + ")",
                                     residual);
        }
    }

    for (int i = 0; i < n; ++i) c.positions.emplace_back(0.0, 0.0, u[i]);
    c.residual = residual;
    c.iterations = iter;
    return c;
}

/// Builds the crystal described by `config`.
inline IonCrystal make_crystal(const TrapConfig &config) {
    config.validate();
    IonCrystal c;
    switch (config.geometry) {
        case Geometry::MicrotrapChain:
            c = make_microtrap_chain(config.n_ions, config.spacing);
            break;
        case Geometry::PaulChain:
            c = solve_paul_chain_equilibrium(config.n_ions);
            break;
        case Geometry::HexLattice:
            c = make_hex_lattice(hex_shells_for(config.n_ions), config.spacing);
            break;
    }
    c.config = config;
    return c;
}

/// Nearest-neighbour spacing at the middle of a chain.
inline double central_spacing(const IonCrystal &c) {
    const auto n = c.size();
    if (n < 2) throw InvalidArgument("central_spacing: need at least 2 ions");
    const std::size_t hi = n / 2;
    return (c.positions[hi] - c.positions[hi - 1]).norm();
}

}  // namespace trapspin
