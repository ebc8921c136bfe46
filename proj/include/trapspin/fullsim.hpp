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
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "trapspin/couplings.hpp"
#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/linalg.hpp"
#include "trapspin/modes.hpp"
#include "trapspin/rng.hpp"
#include "trapspin/spinsim.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

// Full space layout: index = spin_index * phonon_dim + phonon_index. The
// phonon index is mixed radix with mode 0 most significant.

inline constexpr int kMaxFullIons = 3;
inline constexpr Eigen::Index kDefaultFullDimensionGuard = 100000;
inline constexpr Eigen::Index kDenseFullLimit = 2048;
inline constexpr double kTruncationWarning = 1e-3;

struct PhononMode {
    Axis axis = Axis::Z;
    /// Index of the mode within its axis.
    int index = 0;
    double frequency = 0.0;
    /// eta(i) for ion i.
    Eigen::VectorXd eta;
};

struct FullHamiltonian {
    int n_ions = 0;
    /// Fock levels kept per mode (0 .. n_max - 1).
    int n_max = 3;
    std::vector<PhononMode> modes;
    TrapFrequencies trap_freqs;
    ForceSpec force;
    Eigen::Index spin_dim = 0;
    Eigen::Index phonon_dim = 0;
    SparseC h_v;
    SparseC h_f;
    SparseC h_m;

    Eigen::Index dimension() const { return spin_dim * phonon_dim; }
    SparseC lab() const { return h_v + h_f + h_m; }

    Eigen::Index stride(std::size_t mode) const {
        Eigen::Index s = 1;
        for (std::size_t k = mode + 1; k < modes.size(); ++k) s *= n_max;
        return s;
    }

    int level(Eigen::Index phonon_index, std::size_t mode) const {
        return static_cast<int>((phonon_index / stride(mode)) % n_max);
    }

    /// Annihilation operator of one mode on the full space.
    SparseC annihilation(std::size_t mode) const {
        std::vector<Eigen::Triplet<cplx>> trip;
        const Eigen::Index st = stride(mode);
        for (Eigen::Index p = 0; p < phonon_dim; ++p) {
            const int l = level(p, mode);
            if (l > 0) trip.emplace_back(p - st, p, std::sqrt(static_cast<double>(l)));
        }
        SparseC a(phonon_dim, phonon_dim);
        a.setFromTriplets(trip.begin(), trip.end());
        return kroneckerProduct(identity(spin_dim), a).eval();
    }

    /// sigma^axis of one ion on the full space.
    SparseC spin(int ion, Axis axis) const {
        return kroneckerProduct(spin_operator(n_ions, ion, axis), identity(phonon_dim)).eval();
    }

    SparseC full_identity() const { return identity(dimension()); }

    static SparseC identity(Eigen::Index n) {
        SparseC id(n, n);
        id.setIdentity();
        return id;
    }
};

/// Lab-frame H = H_v + H_f + H_m with H_f = -sum eta omega (1 + sigma)(a^dag + a).
inline FullHamiltonian build_full_hamiltonian(const IonCrystal &crystal, const std::vector<ModeData> &modes,
                                              const ForceSpec &force, const TrapFrequencies &freqs, int n_max,
                                              Eigen::Index guard = kDefaultFullDimensionGuard) {
    force.validate();
    freqs.validate();
    const int n = static_cast<int>(crystal.size());
    if (n < 1) throw InvalidArgument("build_full_hamiltonian: empty crystal");
    if (n > kMaxFullIons) {
        throw CapacityError("build_full_hamiltonian: " + std::to_string(n) + " ions exceeds the limit of " +
                            std::to_string(kMaxFullIons));
    }
    if (n_max < 2) throw InvalidArgument("build_full_hamiltonian: n_max must be >= 2");

    FullHamiltonian fh;
    fh.n_ions = n;
    fh.n_max = n_max;
    fh.trap_freqs = freqs;
    fh.force = force;
    PerAxis<bool> present{};
    for (const auto &md : modes) {
        if (static_cast<int>(md.mode_matrix.rows()) != n) {
            throw InvalidArgument("build_full_hamiltonian: mode data does not match crystal size");
        }
        if (present[md.axis]) throw InvalidArgument("build_full_hamiltonian: axis listed twice");
        present[md.axis] = true;
        require_nondegenerate(md, "build_full_hamiltonian");
        const EtaMatrix eta = eta_matrix(md, force.force[md.axis]);
        for (Eigen::Index k = 0; k < md.frequencies.size(); ++k) {
            fh.modes.push_back({md.axis, static_cast<int>(k), md.frequencies[k], eta.entries.col(k)});
        }
    }
    for (Axis a : kAllAxes) {
        if (!present[a] && force.force[a] != 0.0) {
            throw InvalidArgument(std::string("build_full_hamiltonian: force along ") + axis_name(a) +
                                  " needs that axis's modes");
        }
    }

    fh.spin_dim = Eigen::Index{1} << n;
    double phonon_dim = 1.0;
    for (std::size_t k = 0; k < fh.modes.size(); ++k) phonon_dim *= n_max;
    if (fh.spin_dim * phonon_dim > static_cast<double>(guard)) {
        throw CapacityError("build_full_hamiltonian: dimension " +
                            std::to_string(static_cast<long long>(fh.spin_dim * phonon_dim)) + " exceeds guard of " +
                            std::to_string(guard));
    }
    fh.phonon_dim = static_cast<Eigen::Index>(phonon_dim);

    const Eigen::Index dim = fh.dimension();
    fh.h_v = SparseC(dim, dim);
    fh.h_f = SparseC(dim, dim);
    const SparseC id = fh.full_identity();
    for (std::size_t k = 0; k < fh.modes.size(); ++k) {
        const auto &m = fh.modes[k];
        const SparseC a = fh.annihilation(k);
        const SparseC ad = a.adjoint();
        fh.h_v += m.frequency * SparseC(ad * a);
        const SparseC quad = ad + a;
        for (int i = 0; i < n; ++i) {
            const double c = m.eta[i] * m.frequency;
            if (c == 0.0) continue;
            fh.h_f += (-c) * SparseC(SparseC(id + fh.spin(i, m.axis)) * quad);
        }
    }
    std::vector<PauliTerm> zeeman;
    for (Axis a : kAllAxes) {
        if (force.bare_field[a] == 0.0) continue;
        for (int i = 0; i < n; ++i) zeeman.push_back({force.bare_field[a], {{i, pauli_for(a)}}});
    }
    fh.h_m = kroneckerProduct(pauli_sum_matrix(n, zeeman), FullHamiltonian::identity(fh.phonon_dim)).eval();
    fh.h_v.makeCompressed();
    fh.h_f.makeCompressed();
    return fh;
}

/// Effective spin model that the full Hamiltonian is meant to simulate.
inline CouplingModel spin_model(const FullHamiltonian &fh) {
    CouplingModel m = CouplingModel::zeros(fh.n_ions);
    PerAxis<double> used_force{};
    for (Axis a : kAllAxes) {
        std::vector<const PhononMode *> axis_modes;
        for (const auto &pm : fh.modes) {
            if (pm.axis == a) axis_modes.push_back(&pm);
        }
        if (axis_modes.empty()) continue;
        used_force[a] = fh.force.force[a];
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(fh.n_ions, fh.n_ions);
        for (const auto *pm : axis_modes) full -= 2.0 * pm->frequency * pm->eta * pm->eta.transpose();
        m.energy_offset += 0.5 * full.trace();
        full.diagonal().setZero();
        m.J[a] = full;
    }
    m.field = effective_field(fh.force.bare_field, fh.trap_freqs, used_force);
    m.provenance.trap_freqs = fh.trap_freqs;
    m.provenance.force = used_force;
    m.provenance.bare_field = fh.force.bare_field;
    m.provenance.method = "mode_sum";
    return m;
}

/// S = sum eta^alpha_{i,n} (1 + sigma^alpha_i)(a^dag - a)_{alpha,n}; anti-Hermitian.
inline SparseC canonical_S(const FullHamiltonian &fh) {
    const Eigen::Index dim = fh.dimension();
    SparseC s(dim, dim);
    const SparseC id = fh.full_identity();
    for (std::size_t k = 0; k < fh.modes.size(); ++k) {
        const auto &m = fh.modes[k];
        const SparseC a = fh.annihilation(k);
        const SparseC diff = SparseC(a.adjoint()) - a;
        for (int i = 0; i < fh.n_ions; ++i) {
            if (m.eta[i] == 0.0) continue;
            s += m.eta[i] * SparseC(SparseC(id + fh.spin(i, m.axis)) * diff);
        }
    }
    s.makeCompressed();
    return s;
}

/// Residual coupling between differently polarized forces on the same ion:
/// H_E = -1/2 sum eta^a_{i,n} eta^b_{i,m} omega_{a,n} (a^dag + a)_{a,n} (a^dag - a)_{b,m} [s^a_i, s^b_i].
inline SparseC residual_coupling(const FullHamiltonian &fh) {
    const Eigen::Index dim = fh.dimension();
    SparseC h(dim, dim);
    std::vector<SparseC> a_ops;
    for (std::size_t k = 0; k < fh.modes.size(); ++k) a_ops.push_back(fh.annihilation(k));
    for (std::size_t k = 0; k < fh.modes.size(); ++k) {
        for (std::size_t l = 0; l < fh.modes.size(); ++l) {
            const auto &mk = fh.modes[k];
            const auto &ml = fh.modes[l];
            if (mk.axis == ml.axis) continue;
            const SparseC phonon = SparseC(SparseC(a_ops[k].adjoint()) + a_ops[k]) *
                                   SparseC(SparseC(a_ops[l].adjoint()) - a_ops[l]);
            for (int i = 0; i < fh.n_ions; ++i) {
                const double c = -0.5 * mk.eta[i] * ml.eta[i] * mk.frequency;
                if (c == 0.0) continue;
                const SparseC sa = fh.spin(i, mk.axis);
                const SparseC sb = fh.spin(i, ml.axis);
                const SparseC comm = SparseC(sa * sb) - SparseC(sb * sa);
                h += c * SparseC(phonon * comm);
            }
        }
    }
    h.makeCompressed();
    return h;
}

/// Transformed-frame Hamiltonian H_v + H_S + H_E, correct through second
/// order in eta. The constant energy offset is dropped.
inline SparseC transformed_hamiltonian(const FullHamiltonian &fh) {
    const SpinHamiltonian hs = build_spin_hamiltonian(spin_model(fh));
    const SparseC hs_full = kroneckerProduct(hs.matrix, FullHamiltonian::identity(fh.phonon_dim)).eval();
    return fh.h_v + hs_full + residual_coupling(fh);
}

enum class Frame { Transformed, Lab };

inline std::string frame_name(Frame f) { return f == Frame::Lab ? "lab" : "transformed"; }

inline Frame parse_frame(const std::string &s) {
    if (s == "transformed") return Frame::Transformed;
    if (s == "lab") return Frame::Lab;
    throw InvalidArgument("unknown frame '" + s + "' (expected transformed or lab)");
}

/// U(t) X on the full space. Lab frame: exp(-i H t). Transformed frame:
/// exp(S) exp(-i H_tf t) exp(-S), with exp(+-S) exact on the truncated space.
inline CMatrix evolve_full(const FullHamiltonian &fh, const CMatrix &x, double t, Frame frame) {
    if (frame == Frame::Lab) {
        const SparseC h = fh.lab();
        if (fh.dimension() <= kDenseFullLimit) return HermitianPropagator(CMatrix(h)).apply(x, t);
        return expm_multiply(h, x, t);
    }
    const SparseC is = cplx(0.0, 1.0) * canonical_S(fh);
    const SparseC htf = transformed_hamiltonian(fh);
    if (fh.dimension() <= kDenseFullLimit) {
        const HermitianPropagator disp(CMatrix{is});
        CMatrix y = disp.apply(x, -1.0);
        y = HermitianPropagator(CMatrix(htf)).apply(y, t);
        return disp.apply(y, 1.0);
    }
    CMatrix y = expm_multiply(is, x, -1.0);
    y = expm_multiply(htf, y, t);
    return expm_multiply(is, y, 1.0);
}

/// Truncated thermal (geometric) distribution shared by every mode.
struct ThermalSpec {
    double nbar = 0.0;
    int n_max = 3;
    /// weights[k]: probability of Fock level k after renormalization.
    Eigen::VectorXd weights;

    static ThermalSpec geometric(double nbar, int n_max) {
        if (!(nbar >= 0) || !std::isfinite(nbar)) throw InvalidArgument("thermal: nbar must be finite and >= 0");
        if (n_max < 1) throw InvalidArgument("thermal: n_max must be >= 1");
        ThermalSpec t;
        t.nbar = nbar;
        t.n_max = n_max;
        t.weights.resize(n_max);
        const double q = nbar / (1.0 + nbar);
        for (int k = 0; k < n_max; ++k) t.weights[k] = std::pow(q, k);
        t.weights /= t.weights.sum();
        return t;
    }

    /// Mean occupation of the truncated distribution.
    double truncated_mean() const {
        double m = 0.0;
        for (Eigen::Index k = 0; k < weights.size(); ++k) m += static_cast<double>(k) * weights[k];
        return m;
    }
};

/// Images of every thermally occupied input |s, n> under the full evolution,
/// together with the ideal spin evolution they are compared against.
struct GateChannel {
    Eigen::Index spin_dim = 0;
    Eigen::Index phonon_dim = 0;
    std::vector<Eigen::Index> configs;
    std::vector<double> weights;
    /// Column c * spin_dim + s holds U |s, configs[c]>.
    CMatrix images;
    CMatrix target;
    /// Largest population reaching the top Fock level from inputs below it.
    double top_level_population = 0.0;

    /// sum_n w_n <psi_f| Tr_ph[U (|psi><psi| x |n><n|) U^dag] |psi_f>, psi_f = target psi.
    double fidelity(const CVector &psi) const {
        const CVector psi_f = target * psi;
        const CVector conj_f = psi_f.conjugate();
        double f = 0.0;
        for (std::size_t c = 0; c < configs.size(); ++c) {
            const CVector v = images.middleCols(static_cast<Eigen::Index>(c) * spin_dim, spin_dim) * psi;
            const Eigen::Map<const CMatrix> r(v.data(), phonon_dim, spin_dim);
            f += weights[c] * (r * conj_f).squaredNorm();
        }
        return f;
    }

    /// sum_{n,k} w_n |Tr(target^dag B_{k,n})|^2 / d^2 with B_{k,n} = <k| U |n>.
    double entanglement_fidelity() const {
        double fe = 0.0;
        for (std::size_t c = 0; c < configs.size(); ++c) {
            CVector amp = CVector::Zero(phonon_dim);
            for (Eigen::Index s = 0; s < spin_dim; ++s) {
                const auto col = images.col(static_cast<Eigen::Index>(c) * spin_dim + s);
                const Eigen::Map<const CMatrix> r(col.data(), phonon_dim, spin_dim);
                amp += r * target.col(s).conjugate();
            }
            fe += weights[c] * amp.squaredNorm();
        }
        const double d = static_cast<double>(spin_dim);
        return fe / (d * d);
    }

    /// Haar average from the entanglement fidelity: (d F_e + 1) / (d + 1).
    double closed_form_average() const {
        const double d = static_cast<double>(spin_dim);
        return (d * entanglement_fidelity() + 1.0) / (d + 1.0);
    }
};

inline GateChannel gate_channel(const FullHamiltonian &fh, double t, const ThermalSpec &thermal, Frame frame) {
    if (!(t >= 0)) throw InvalidArgument("gate_channel: t must be >= 0");
    if (thermal.n_max != fh.n_max) throw InvalidArgument("gate_channel: thermal cutoff differs from Hamiltonian");
    GateChannel g;
    g.spin_dim = fh.spin_dim;
    g.phonon_dim = fh.phonon_dim;
    std::vector<char> below_top;
    for (Eigen::Index p = 0; p < fh.phonon_dim; ++p) {
        double w = 1.0;
        bool low = true;
        for (std::size_t k = 0; k < fh.modes.size(); ++k) {
            const int l = fh.level(p, k);
            w *= thermal.weights[l];
            low = low && l < fh.n_max - 1;
        }
        if (w > 0.0) {
            g.configs.push_back(p);
            g.weights.push_back(w);
            below_top.push_back(low);
        }
    }
    const auto n_cols = static_cast<Eigen::Index>(g.configs.size()) * g.spin_dim;
    CMatrix inputs = CMatrix::Zero(fh.dimension(), n_cols);
    for (std::size_t c = 0; c < g.configs.size(); ++c) {
        for (Eigen::Index s = 0; s < g.spin_dim; ++s) {
            inputs(s * fh.phonon_dim + g.configs[c], static_cast<Eigen::Index>(c) * g.spin_dim + s) = 1.0;
        }
    }
    g.images = evolve_full(fh, inputs, t, frame);

    const SpinHamiltonian hs = build_spin_hamiltonian(spin_model(fh));
    g.target = HermitianPropagator(hs.dense()).unitary(t);

    std::vector<char> top(fh.phonon_dim, 0);
    for (Eigen::Index p = 0; p < fh.phonon_dim; ++p) {
        for (std::size_t k = 0; k < fh.modes.size(); ++k) top[p] = top[p] || fh.level(p, k) == fh.n_max - 1;
    }
    for (std::size_t c = 0; c < g.configs.size(); ++c) {
        if (!below_top[c]) continue;
        for (Eigen::Index s = 0; s < g.spin_dim; ++s) {
            const auto col = g.images.col(static_cast<Eigen::Index>(c) * g.spin_dim + s);
            double pop = 0.0;
            for (Eigen::Index q = 0; q < fh.dimension(); ++q) {
                if (top[q % fh.phonon_dim]) pop += std::norm(col[q]);
            }
            g.top_level_population = std::max(g.top_level_population, pop);
        }
    }
    return g;
}

/// Fidelity of one initial spin state against the ideal spin evolution.
inline double fidelity(const CVector &psi, double t, const FullHamiltonian &fh, const ThermalSpec &thermal,
                       Frame frame = Frame::Transformed) {
    if (std::abs(psi.norm() - 1.0) > 1e-12) throw InvalidArgument("fidelity: initial state must be normalized");
    return gate_channel(fh, t, thermal, frame).fidelity(psi);
}

enum class StateMeasure { Haar, Product };

inline std::string measure_name(StateMeasure m) { return m == StateMeasure::Haar ? "haar" : "product"; }

inline StateMeasure parse_measure(const std::string &s) {
    if (s == "haar") return StateMeasure::Haar;
    if (s == "product") return StateMeasure::Product;
    throw InvalidArgument("unknown state measure '" + s + "' (expected haar or product)");
}

inline CVector haar_state(Eigen::Index dim, SplitMix64 &rng) {
    CVector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = rng.complex_normal();
    return v.normalized();
}

/// Tensor product of independent Haar-random single-spin states.
inline CVector product_haar_state(int n_spins, SplitMix64 &rng) {
    CVector v = CVector::Ones(1);
    for (int i = 0; i < n_spins; ++i) {
        const CVector q = haar_state(2, rng);
        CVector next(v.size() * 2);
        for (Eigen::Index a = 0; a < v.size(); ++a) {
            next[2 * a] = v[a] * q[0];
            next[2 * a + 1] = v[a] * q[1];
        }
        v = next;
    }
    return v;
}

struct FidelityReport {
    double fidelity = 1.0;
    double error = 0.0;
    double standard_error = 0.0;
    int n_samples = 0;
    /// Haar average from the entanglement fidelity (cross-check).
    double closed_form_fidelity = 1.0;
    std::uint64_t seed = 0;
    std::string frame;
    std::string measure;

    // Parameter echo.
    double eta = 0.0;
    double nbar = 0.0;
    double truncated_nbar = 0.0;
    int n_max = 0;
    double omega_x = 0.0;
    double omega_y = 0.0;
    double omega_z = 1.0;
    double duration = 0.0;
    double coupling = 0.0;

    double top_level_population = 0.0;
    std::vector<std::string> warnings;
};

inline constexpr double kFidelityUpperSlack = 1e-9;

/// Monte Carlo average over random initial states; sample k draws from the
/// counter stream (seed, k), so results do not depend on evaluation order.
inline FidelityReport average_fidelity(const GateChannel &channel, int n_samples, std::uint64_t seed,
                                       StateMeasure measure = StateMeasure::Haar) {
    if (n_samples < 1) throw InvalidArgument("average_fidelity: n_samples must be >= 1");
    FidelityReport r;
    r.n_samples = n_samples;
    r.seed = seed;
    r.measure = measure_name(measure);
    const int n_spins = static_cast<int>(std::lround(std::log2(static_cast<double>(channel.spin_dim))));
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        auto rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(k));
        const CVector psi =
            measure == StateMeasure::Haar ? haar_state(channel.spin_dim, rng) : product_haar_state(n_spins, rng);
        const double f = channel.fidelity(psi);
        if (f < -kFidelityUpperSlack || f > 1.0 + kFidelityUpperSlack) {
            throw AccuracyError("average_fidelity: sample fidelity " + std::to_string(f) + " outside [0, 1]");
        }
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / n_samples;
    r.fidelity = mean;
    r.error = 1.0 - mean;
    if (n_samples > 1) {
        const double var = std::max(0.0, (sum2 - n_samples * mean * mean) / (n_samples - 1));
        r.standard_error = std::sqrt(var / n_samples);
    }
    r.closed_form_fidelity = channel.closed_form_average();
    r.top_level_population = channel.top_level_population;
    if (channel.top_level_population > kTruncationWarning) {
        r.warnings.push_back("truncation: population " + std::to_string(channel.top_level_population) +
                             " reached the top Fock level; increase n_max");
    }
    return r;
}

enum class TrapSymmetry { Symmetric, Asymmetric };

struct ErrorReference {
    double eta = 0.05;
    double nbar = 0.0;
    double coupling = 1.0;
    double detuning = 1.0;
};

struct ErrorScaling {
    /// E / E_ref from the eta^2 law (times (1 + 2 nbar) for a symmetric trap).
    double ratio = 1.0;
    /// Resonant H_E contribution J^2 / (omega_x - omega_y)^2 relative to the
    /// reference; zero for a symmetric trap, where that channel is resonant.
    double detuning_ratio = 0.0;
    bool depends_on_nbar = true;
};

/// Normalized analytic error scalings; the prefactors are not known.
inline ErrorScaling error_estimate(double eta, double nbar, TrapSymmetry trap, double detuning, double coupling,
                                   const ErrorReference &ref = {}) {
    if (!(eta > 0) || !(nbar >= 0) || !(coupling > 0)) {
        throw InvalidArgument("error_estimate: eta and coupling must be positive, nbar >= 0");
    }
    if (!(ref.eta > 0) || !(ref.nbar >= 0)) throw InvalidArgument("error_estimate: bad reference point");
    ErrorScaling e;
    const double eta_part = (eta / ref.eta) * (eta / ref.eta);
    if (trap == TrapSymmetry::Symmetric) {
        e.ratio = eta_part * (1.0 + 2.0 * nbar) / (1.0 + 2.0 * ref.nbar);
        e.depends_on_nbar = true;
        return e;
    }
    if (detuning == 0.0 || ref.detuning == 0.0) {
        throw InvalidArgument("error_estimate: asymmetric trap needs omega_x != omega_y");
    }
    e.ratio = eta_part;
    e.detuning_ratio = (coupling * coupling / (detuning * detuning)) /
                       (ref.coupling * ref.coupling / (ref.detuning * ref.detuning));
    e.depends_on_nbar = false;
    return e;
}

enum class EtaReference { AxialFrequency, ComMode };

inline std::string eta_reference_name(EtaReference r) {
    return r == EtaReference::ComMode ? "com" : "omega_z";
}

inline EtaReference parse_eta_reference(const std::string &s) {
    if (s == "omega_z") return EtaReference::AxialFrequency;
    if (s == "com") return EtaReference::ComMode;
    throw InvalidArgument("unknown eta reference '" + s + "' (expected omega_z or com)");
}

/// Two-ion XY simulation with radial forces along x and y.
struct XYGateParams {
    double omega_x = 1.4;
    /// omega_y / omega_x.
    double y_ratio = 0.75;
    double eta = 0.05;
    double nbar = 0.25;
    int n_max = 3;
    int n_samples = 200;
    std::uint64_t seed = 1;
    EtaReference eta_reference = EtaReference::ComMode;
    Frame frame = Frame::Transformed;
    StateMeasure measure = StateMeasure::Haar;
};

struct XYGateSetup {
    IonCrystal crystal;
    TrapFrequencies freqs;
    ForceSpec force;
    std::vector<ModeData> modes;
    /// J^x_12 = J^y_12.
    double coupling = 0.0;
    /// pi / (8 J).
    double duration = 0.0;
};

/// Crystal, radial modes and forces for the XY simulation. F_x follows from
/// eta; F_y is set so that J^y_12 = J^x_12 (equal forces when omega_x = omega_y).
inline XYGateSetup xy_gate_setup(const XYGateParams &p) {
    if (!(p.omega_x > 1.0)) throw InvalidArgument("xy gate: omega_x must exceed omega_z for a linear chain");
    if (!(p.y_ratio > 0)) throw InvalidArgument("xy gate: y_ratio must be positive");
    if (!(p.eta > 0)) throw InvalidArgument("xy gate: eta must be positive");
    XYGateSetup s;
    s.freqs = {p.omega_x, p.y_ratio * p.omega_x, 1.0};
    s.freqs.validate();
    TrapConfig cfg;
    cfg.geometry = Geometry::PaulChain;
    cfg.n_ions = 2;
    cfg.trap_freqs = s.freqs;
    s.crystal = make_crystal(cfg);
    const ModeData mx = normal_modes(elasticity_matrix(s.crystal, Axis::X, s.freqs));
    const ModeData my = normal_modes(elasticity_matrix(s.crystal, Axis::Y, s.freqs));
    const double w_ref = p.eta_reference == EtaReference::ComMode ? mx.frequencies.maxCoeff() : s.freqs.z;
    const double fx = force_for_eta(p.eta, w_ref);
    const double jx = coupling_from_modes(mx, fx).J(0, 1);
    const double jy_unit = coupling_from_modes(my, 1.0).J(0, 1);
    if (!(jx > 0) || !(jy_unit > 0)) throw InstabilityError("xy gate: radial couplings are not positive", 0.0);
    s.force.force[Axis::X] = fx;
    s.force.force[Axis::Y] = std::sqrt(jx / jy_unit);
    s.modes = {mx, my};
    s.coupling = jx;
    s.duration = std::numbers::pi / (8.0 * jx);
    return s;
}

inline FidelityReport xy_gate_experiment(const XYGateParams &p) {
    const XYGateSetup s = xy_gate_setup(p);
    const FullHamiltonian fh = build_full_hamiltonian(s.crystal, s.modes, s.force, s.freqs, p.n_max);
    const ThermalSpec thermal = ThermalSpec::geometric(p.nbar, p.n_max);
    const GateChannel ch = gate_channel(fh, s.duration, thermal, p.frame);
    FidelityReport r = average_fidelity(ch, p.n_samples, p.seed, p.measure);
    r.frame = frame_name(p.frame);
    r.eta = p.eta;
    r.nbar = p.nbar;
    r.truncated_nbar = thermal.truncated_mean();
    r.n_max = p.n_max;
    r.omega_x = s.freqs.x;
    r.omega_y = s.freqs.y;
    r.omega_z = s.freqs.z;
    r.duration = s.duration;
    r.coupling = s.coupling;
    return r;
}

/// Spin-sector content of exp(-S) H exp(S) restricted to the phonon vacuum.
struct FrameCheck {
    PerAxis<Eigen::MatrixXd> extracted_J;
    PerAxis<Eigen::MatrixXd> reference_J;
    /// Site-averaged coefficient of sigma^alpha_i.
    PerAxis<double> extracted_field{};
    PerAxis<double> reference_field{};
    double coupling_residual = 0.0;
    double field_residual = 0.0;
    /// Largest |<s', n != 0| exp(-S) H exp(S) |s, 0>|.
    double cross_term = 0.0;
    /// Population of exp(S)|s, 0> in the top Fock level (truncation scale).
    double truncation_population = 0.0;
};

/// Applies the transformation to the vacuum columns only, so the working
/// cutoff can be much larger than the extracted block.
inline FrameCheck frame_check(const FullHamiltonian &fh) {
    const Eigen::Index sd = fh.spin_dim;
    const Eigen::Index pd = fh.phonon_dim;
    CMatrix x = CMatrix::Zero(fh.dimension(), sd);
    for (Eigen::Index s = 0; s < sd; ++s) x(s * pd, s) = 1.0;
    const SparseC is = cplx(0.0, 1.0) * canonical_S(fh);
    const CMatrix y = expm_multiply(is, x, 1.0);
    const CMatrix w = expm_multiply(is, CMatrix(fh.lab() * y), -1.0);

    FrameCheck fc;
    for (Eigen::Index q = 0; q < fh.dimension(); ++q) {
        const Eigen::Index p = q % pd;
        bool top = false;
        for (std::size_t k = 0; k < fh.modes.size(); ++k) top = top || fh.level(p, k) == fh.n_max - 1;
        if (top) fc.truncation_population = std::max(fc.truncation_population, y.row(q).cwiseAbs2().maxCoeff());
        if (p != 0) fc.cross_term = std::max(fc.cross_term, w.row(q).cwiseAbs().maxCoeff());
    }

    CMatrix vac(sd, sd);
    for (Eigen::Index a = 0; a < sd; ++a) {
        for (Eigen::Index b = 0; b < sd; ++b) vac(a, b) = w(a * pd, b);
    }
    const CouplingModel ref = spin_model(fh);
    PerAxis<bool> present{};
    for (const auto &m : fh.modes) present[m.axis] = true;
    const int n = fh.n_ions;
    for (Axis a : kAllAxes) {
        fc.extracted_J[a] = Eigen::MatrixXd::Zero(n, n);
        fc.reference_J[a] = ref.J[a];
        double field = 0.0;
        for (int i = 0; i < n; ++i) {
            field += pauli_coefficient(vac, n, {1.0, {{i, pauli_for(a)}}}).real() / n;
            for (int j = i + 1; j < n; ++j) {
                const double c = pauli_coefficient(vac, n, {1.0, {{i, pauli_for(a)}, {j, pauli_for(a)}}}).real();
                fc.extracted_J[a](i, j) = fc.extracted_J[a](j, i) = c;
            }
        }
        fc.extracted_field[a] = field;
        fc.reference_field[a] = ref.field[a];
        if (!present[a]) continue;
        fc.coupling_residual = std::max(fc.coupling_residual,
                                        (fc.extracted_J[a] - fc.reference_J[a]).lpNorm<Eigen::Infinity>());
        fc.field_residual = std::max(fc.field_residual, std::abs(field - ref.field[a]));
    }
    return fc;
}

}  // namespace trapspin
