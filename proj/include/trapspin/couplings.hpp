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
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/modes.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

/// Laser forces and bare effective fields.
///
/// Forces are in hbar*omega_z / l and push an ion along alpha when its spin is
/// up along alpha; fields multiply sigma^alpha and are in hbar*omega_z.
struct ForceSpec {
    PerAxis<double> force;
    PerAxis<double> bare_field;

    void validate() const {
        for (Axis a : kAllAxes) {
            if (!(force[a] >= 0) || !std::isfinite(force[a])) {
                throw InvalidArgument(std::string("force along ") + axis_name(a) + " must be finite and >= 0");
            }
            if (!std::isfinite(bare_field[a])) throw InvalidArgument("bare field must be finite");
        }
    }
};

/// Force that produces the displacement parameter `eta` on a mode of
/// frequency `reference_frequency`: eta = F / (sqrt(2) omega^(3/2)).
inline double force_for_eta(double eta, double reference_frequency) {
    if (!(eta >= 0)) throw InvalidArgument("force_for_eta: eta must be >= 0");
    if (!(reference_frequency > 0)) throw InvalidArgument("force_for_eta: reference frequency must be positive");
    return eta * std::sqrt(2.0) * std::pow(reference_frequency, 1.5);
}

inline double eta_for_force(double force, double reference_frequency) {
    return force / (std::sqrt(2.0) * std::pow(reference_frequency, 1.5));
}

struct EtaMatrix {
    Axis axis = Axis::Z;
    /// eta(i, n): ion i, mode n.
    Eigen::MatrixXd entries;
};

inline void require_nondegenerate(const ModeData &modes, const char *who) {
    for (Eigen::Index n = 0; n < modes.frequencies.size(); ++n) {
        if (!(modes.frequencies[n] > 0)) {
            throw DegenerateModeError(std::string(who) + ": mode " + std::to_string(n) + " along " +
                                      axis_name(modes.axis) + " has zero frequency");
        }
    }
}

inline EtaMatrix eta_matrix(const ModeData &modes, double force) {
    require_nondegenerate(modes, "eta_matrix");
    EtaMatrix e;
    e.axis = modes.axis;
    e.entries = modes.mode_matrix;
    for (Eigen::Index n = 0; n < e.entries.cols(); ++n) {
        const double w = modes.frequencies[n];
        e.entries.col(n) *= force / (std::sqrt(2.0) * std::pow(w, 1.5));
    }
    return e;
}

inline EtaMatrix eta_matrix(const ModeData &modes, const ForceSpec &force) {
    return eta_matrix(modes, force.force[modes.axis]);
}

/// Spin-spin couplings transmitted by the modes of one axis.
struct AxisCoupling {
    Axis axis = Axis::Z;
    /// Symmetric, zero diagonal, units hbar*omega_z.
    Eigen::MatrixXd J;
    /// Half the trace of the full mode-sum matrix; the sigma_i^2 = 1 part.
    double energy_offset = 0.0;
    double force = 0.0;
};

namespace detail {

inline AxisCoupling strip_diagonal(Axis axis, Eigen::MatrixXd full, double force) {
    AxisCoupling c;
    c.axis = axis;
    c.force = force;
    c.energy_offset = 0.5 * full.trace();
    full.diagonal().setZero();
    c.J = std::move(full);
    return c;
}

}  // namespace detail

/// Mode-sum coupling -J = sum_n F^2 M_in M_jn / omega_n^2, cross-checked
/// against the equivalent displacement form 2 sum_n eta_in eta_jn omega_n.
inline AxisCoupling coupling_from_modes(const ModeData &modes, double force) {
    if (!(force >= 0)) throw InvalidArgument("coupling_from_modes: force must be >= 0");
    require_nondegenerate(modes, "coupling_from_modes");
    const Eigen::VectorXd inv_w2 = modes.frequencies.array().square().inverse();
    const Eigen::MatrixXd full = -force * force * modes.mode_matrix * inv_w2.asDiagonal() * modes.mode_matrix.transpose();

    const Eigen::MatrixXd eta = eta_matrix(modes, force).entries;
    const Eigen::MatrixXd via_eta = -2.0 * eta * modes.frequencies.asDiagonal() * eta.transpose();
    const double scale = std::max(1.0, full.lpNorm<Eigen::Infinity>());
    if ((full - via_eta).lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
        throw Error("coupling_from_modes: mode-sum forms disagree");
    }
    return detail::strip_diagonal(modes.axis, full, force);
}

inline AxisCoupling coupling_from_modes(const ModeData &modes, const ForceSpec &force) {
    return coupling_from_modes(modes, force.force[modes.axis]);
}

/// J = -F^2 K^{-1}.
inline AxisCoupling coupling_from_inverse_K(const ElasticityMatrix &k, double force) {
    if (!(force >= 0)) throw InvalidArgument("coupling_from_inverse_K: force must be >= 0");
    const Eigen::LLT<Eigen::MatrixXd> llt(k.entries);
    if (llt.info() != Eigen::Success) {
        throw InstabilityError(std::string("elasticity matrix along ") + axis_name(k.axis) +
                                   " is not positive definite",
                               0.0);
    }
    const auto n = k.entries.rows();
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    return detail::strip_diagonal(k.axis, -force * force * inv, force);
}

inline AxisCoupling coupling_from_inverse_K(const ElasticityMatrix &k, const ForceSpec &force) {
    return coupling_from_inverse_K(k, force.force[k.axis]);
}

struct DipolarCoupling {
    AxisCoupling coupling;
    /// Absent for a single ion.
    std::optional<BetaParam> beta;
};

/// First-order (stiff-mode) approximation J_ij = c F^2 / (omega^4 r_ij^3).
inline DipolarCoupling stiff_limit_dipolar(const IonCrystal &crystal, Axis axis, const TrapFrequencies &freqs,
                                           double force) {
    freqs.validate();
    const auto n = static_cast<Eigen::Index>(crystal.size());
    const double c = geometry_constant(crystal, axis);
    const double w = freqs[axis];
    DipolarCoupling out;
    out.coupling.axis = axis;
    out.coupling.force = force;
    out.coupling.J = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double r = (crystal.positions[i] - crystal.positions[j]).norm();
            out.coupling.J(i, j) = c * force * force / (std::pow(w, 4) * r * r * r);
        }
    }
    if (n >= 2) out.beta = beta(crystal, axis, freqs);
    return out;
}

/// Site-independent effective field B'^alpha = B^alpha - F_alpha^2 / omega_alpha^2.
///
/// The shift is the row sum of the full mode-sum coupling matrix: expanding
/// (1 + sigma_i)(1 + sigma_j) gives sum_j J_ij sigma_i, and K 1 = omega^2 1 for
/// any harmonically trapped Coulomb crystal, so every row sums to -F^2/omega^2.
inline PerAxis<double> effective_field(const PerAxis<double> &bare, const TrapFrequencies &freqs,
                                       const PerAxis<double> &force) {
    freqs.validate();
    PerAxis<double> out;
    for (Axis a : kAllAxes) {
        const double w = freqs[a];
        out[a] = bare[a] - force[a] * force[a] / (w * w);
    }
    return out;
}

/// Compiled effective spin model on N sites.
struct CouplingModel {
    int n_ions = 0;
    PerAxis<Eigen::MatrixXd> J;
    /// Uniform field B'^alpha on every site.
    PerAxis<double> field;
    double energy_offset = 0.0;

    struct Provenance {
        std::string geometry;
        TrapFrequencies trap_freqs;
        PerAxis<double> force;
        PerAxis<double> bare_field;
        std::string method;
    } provenance;

    static CouplingModel zeros(int n) {
        CouplingModel m;
        m.n_ions = n;
        for (Axis a : kAllAxes) m.J[a] = Eigen::MatrixXd::Zero(n, n);
        return m;
    }
};

enum class CouplingMethod { ModeSum, InverseElasticity };

/// Crystal + forces -> effective spin model on every forced axis.
inline CouplingModel compile_couplings(const IonCrystal &crystal, const TrapFrequencies &freqs, const ForceSpec &spec,
                                       CouplingMethod method = CouplingMethod::ModeSum) {
    spec.validate();
    const int n = static_cast<int>(crystal.size());
    CouplingModel model = CouplingModel::zeros(n);
    for (Axis a : kAllAxes) {
        if (spec.force[a] == 0.0) continue;
        const ElasticityMatrix k = elasticity_matrix(crystal, a, freqs);
        const AxisCoupling c = method == CouplingMethod::ModeSum ? coupling_from_modes(normal_modes(k), spec.force[a])
                                                                 : coupling_from_inverse_K(k, spec.force[a]);
        model.J[a] = c.J;
        model.energy_offset += c.energy_offset;
    }
    model.field = effective_field(spec.bare_field, freqs, spec.force);
    model.provenance.geometry = geometry_name(crystal.config.geometry);
    model.provenance.trap_freqs = freqs;
    model.provenance.force = spec.force;
    model.provenance.bare_field = spec.bare_field;
    model.provenance.method = method == CouplingMethod::ModeSum ? "mode_sum" : "inverse_elasticity";
    return model;
}

}  // namespace trapspin
