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
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trapspin/couplings.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/linalg.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

// Basis convention: site i is bit (n - 1 - i) of the basis index, so the index
// reads left to right as sites 0..n-1 (Kronecker order). Bit 0 is spin up
// (sigma^z = +1), bit 1 is spin down.

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline Pauli pauli_for(Axis a) {
    switch (a) {
        case Axis::X:
            return Pauli::X;
        case Axis::Y:
            return Pauli::Y;
        case Axis::Z:
            return Pauli::Z;
    }
    return Pauli::I;
}

/// coefficient * prod_k sigma^{ops[k].second}_{ops[k].first}
struct PauliTerm {
    double coefficient = 0.0;
    std::vector<std::pair<int, Pauli>> ops;
};

namespace detail {

inline std::uint64_t site_bit(int n, int site) { return std::uint64_t{1} << (n - 1 - site); }

struct PauliMasks {
    std::uint64_t flip = 0;
    std::uint64_t phase = 0;
    int n_y = 0;
};

inline PauliMasks masks_of(int n, const PauliTerm &t) {
    PauliMasks m;
    for (auto [site, p] : t.ops) {
        if (site < 0 || site >= n) throw InvalidArgument("Pauli term site out of range");
        const auto bit = site_bit(n, site);
        if (p == Pauli::X || p == Pauli::Y) m.flip ^= bit;
        if (p == Pauli::Z || p == Pauli::Y) m.phase ^= bit;
        if (p == Pauli::Y) ++m.n_y;
    }
    return m;
}

// <b ^ flip| P |b> for a Pauli string with sigma^y = i sigma^x sigma^z.
inline cplx pauli_element(const PauliMasks &m, std::uint64_t b) {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const double sign = (std::popcount(b & m.phase) & 1) ? -1.0 : 1.0;
    return sign * kIPow[m.n_y & 3];
}

}  // namespace detail

/// Sparse matrix of a sum of Pauli strings on n spins.
inline SparseC pauli_sum_matrix(int n, const std::vector<PauliTerm> &terms) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::map<std::uint64_t, std::vector<std::pair<detail::PauliMasks, double>>> by_flip;
    for (const auto &t : terms) {
        if (t.coefficient == 0.0) continue;
        const auto m = detail::masks_of(n, t);
        by_flip[m.flip].emplace_back(m, t.coefficient);
    }
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(dim * std::max<std::size_t>(1, by_flip.size()));
    for (const auto &[flip, group] : by_flip) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            cplx v = 0.0;
            for (const auto &[m, c] : group) v += c * detail::pauli_element(m, b);
            if (v != cplx(0.0)) trip.emplace_back(static_cast<int>(b ^ flip), static_cast<int>(b), v);
        }
    }
    SparseC h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.setFromTriplets(trip.begin(), trip.end());
    h.makeCompressed();
    return h;
}

/// Matrix of sigma^axis on one site.
inline SparseC spin_operator(int n, int site, Axis axis) {
    return pauli_sum_matrix(n, {PauliTerm{1.0, {{site, pauli_for(axis)}}}});
}

/// Tr(P H) / 2^n: the coefficient of a Pauli string in a dense operator.
inline cplx pauli_coefficient(const CMatrix &h, int n, const PauliTerm &string) {
    const auto m = detail::masks_of(n, string);
    const std::uint64_t dim = std::uint64_t{1} << n;
    cplx acc = 0.0;
    // Tr(P H) = sum_b <b|P H|b> = sum_b conj(<b^f|P|b>)... P is Hermitian up to
    // the sign convention, so use <b|P|b^f> = conj(<b^f|P|b>).
    for (std::uint64_t b = 0; b < dim; ++b) {
        acc += std::conj(detail::pauli_element(m, b)) * h(static_cast<Eigen::Index>(b ^ m.flip), static_cast<Eigen::Index>(b));
    }
    return acc / static_cast<double>(dim);
}

struct SpinHamiltonian {
    int n_spins = 0;
    std::vector<PauliTerm> terms;
    SparseC matrix;

    Eigen::Index dimension() const { return matrix.rows(); }
    CMatrix dense() const { return CMatrix(matrix); }

    static SpinHamiltonian from_terms(int n, std::vector<PauliTerm> terms) {
        SpinHamiltonian h;
        h.n_spins = n;
        h.matrix = pauli_sum_matrix(n, terms);
        h.terms = std::move(terms);
        return h;
    }
};

inline constexpr int kDefaultSpinGuard = 16;

/// H_S = sum_{alpha, i<j} J^alpha_ij sigma^alpha_i sigma^alpha_j
///     + sum_{alpha, i} B'^alpha sigma^alpha_i.
inline SpinHamiltonian build_spin_hamiltonian(const CouplingModel &model, int guard = kDefaultSpinGuard) {
    const int n = model.n_ions;
    if (n < 1) throw InvalidArgument("build_spin_hamiltonian: empty model");
    if (n > guard) {
        throw CapacityError("build_spin_hamiltonian: " + std::to_string(n) + " spins exceeds guard of " +
                            std::to_string(guard));
    }
    std::vector<PauliTerm> terms;
    for (Axis a : kAllAxes) {
        const auto p = pauli_for(a);
        const auto &j = model.J[a];
        if (j.size() != 0) {
            for (int i = 0; i < n; ++i) {
                for (int k = i + 1; k < n; ++k) {
                    const double c = 0.5 * (j(i, k) + j(k, i));
                    if (c != 0.0) terms.push_back({c, {{i, p}, {k, p}}});
                }
            }
        }
        if (model.field[a] != 0.0) {
            for (int i = 0; i < n; ++i) terms.push_back({model.field[a], {{i, p}}});
        }
    }
    return SpinHamiltonian::from_terms(n, std::move(terms));
}

/// State vector over spins, optionally tensored with phonon Fock levels.
struct QuantumState {
    CVector amplitudes;
    int n_spins = 0;
    /// Fock cutoff per mode, empty for a spin-only state.
    std::vector<int> phonon_levels;

    Eigen::Index dimension() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }
};

inline QuantumState basis_state(int n, std::uint64_t index) {
    QuantumState s;
    s.n_spins = n;
    s.amplitudes = CVector::Zero(Eigen::Index{1} << n);
    s.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

inline QuantumState all_down(int n) { return basis_state(n, (std::uint64_t{1} << n) - 1); }

/// Product state from a single-site state (amplitudes for |up>, |down>).
inline QuantumState product_state(int n, cplx up, cplx down) {
    QuantumState s;
    s.n_spins = n;
    const Eigen::Index dim = Eigen::Index{1} << n;
    s.amplitudes.resize(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        cplx a = 1.0;
        for (int i = 0; i < n; ++i) a *= (b & detail::site_bit(n, i)) ? down : up;
        s.amplitudes[b] = a;
    }
    s.amplitudes.normalize();
    return s;
}

struct GroundState {
    double energy = 0.0;
    /// Orthonormal basis of the ground space.
    std::vector<QuantumState> states;
    bool degenerate = false;

    /// Weight of `psi` in the ground space.
    double overlap(const QuantumState &psi) const {
        double p = 0.0;
        for (const auto &g : states) p += std::norm(g.amplitudes.dot(psi.amplitudes));
        return p;
    }
};

inline constexpr double kDegeneracyTolerance = 1e-9;
inline constexpr Eigen::Index kDenseEigenLimit = 256;

inline GroundState ground_state(const SparseC &h, int n_spins, double degeneracy_tol = kDegeneracyTolerance) {
    GroundState g;
    std::vector<EigenPair> pairs;
    if (h.rows() <= kDenseEigenLimit) {
        const Eigen::SelfAdjointEigenSolver<CMatrix> solver{CMatrix(h)};
        const auto &ev = solver.eigenvalues();
        for (Eigen::Index k = 0; k < ev.size(); ++k) {
            if (ev[k] - ev[0] > degeneracy_tol * std::max(1.0, std::abs(ev[0]))) break;
            pairs.push_back({ev[k], solver.eigenvectors().col(k)});
        }
    } else {
        pairs = lowest_eigenspace(h, degeneracy_tol);
    }
    g.energy = pairs.front().value;
    for (auto &p : pairs) {
        QuantumState s;
        s.n_spins = n_spins;
        s.amplitudes = std::move(p.vector);
        g.states.push_back(std::move(s));
    }
    g.degenerate = g.states.size() > 1;
    return g;
}

inline GroundState ground_state(const SpinHamiltonian &h, double degeneracy_tol = kDegeneracyTolerance) {
    return ground_state(h.matrix, h.n_spins, degeneracy_tol);
}

inline double expectation(const SparseC &op, const QuantumState &psi) {
    return psi.amplitudes.dot(op * psi.amplitudes).real();
}

struct Observables {
    /// magnetization[alpha][i] = <sigma^alpha_i>
    PerAxis<Eigen::VectorXd> magnetization;
    /// correlation[alpha](i, j) = <sigma^alpha_i sigma^alpha_j>
    PerAxis<Eigen::MatrixXd> correlation;
    /// S(k_m) = (1/N) sum_ij cos(k_m (i - j)) <sz_i sz_j>, k_m = 2 pi m / N.
    Eigen::VectorXd structure_factor;
    /// Global fluorescence: population of |up>, sum_i (1 + <sz_i>) / 2.
    double fluorescence = 0.0;

    /// Structure factor divided by N (a Neel state gives 1 at k = pi).
    Eigen::VectorXd normalized_structure_factor() const {
        return structure_factor / static_cast<double>(structure_factor.size());
    }

    /// Mean nearest-neighbour <sz_i sz_{i+1}> along the site order.
    double nearest_neighbor_zz() const {
        const auto &c = correlation[Axis::Z];
        const auto n = c.rows();
        if (n < 2) return 0.0;
        double s = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i) s += c(i, i + 1);
        return s / static_cast<double>(n - 1);
    }

    double total_magnetization(Axis a) const { return magnetization[a].sum(); }
};

inline Observables observables(const QuantumState &psi) {
    const int n = psi.n_spins;
    if (psi.dimension() != (Eigen::Index{1} << n)) {
        throw InvalidArgument("observables: state dimension does not match spin count");
    }
    Observables o;
    const Eigen::Index dim = psi.dimension();
    for (Axis a : kAllAxes) {
        o.magnetization[a] = Eigen::VectorXd::Zero(n);
        o.correlation[a] = Eigen::MatrixXd::Identity(n, n);
    }

    // Diagonal (z) quantities straight from probabilities.
    const Eigen::VectorXd prob = psi.amplitudes.cwiseAbs2();
    for (Eigen::Index b = 0; b < dim; ++b) {
        const double p = prob[b];
        if (p == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const double si = (b & detail::site_bit(n, i)) ? -1.0 : 1.0;
            o.magnetization[Axis::Z][i] += p * si;
            for (int j = i + 1; j < n; ++j) {
                const double sj = (b & detail::site_bit(n, j)) ? -1.0 : 1.0;
                o.correlation[Axis::Z](i, j) += p * si * sj;
            }
        }
    }
    for (Axis a : {Axis::X, Axis::Y}) {
        const auto p = pauli_for(a);
        for (int i = 0; i < n; ++i) {
            o.magnetization[a][i] = expectation(pauli_sum_matrix(n, {{1.0, {{i, p}}}}), psi);
            for (int j = i + 1; j < n; ++j) {
                o.correlation[a](i, j) = expectation(pauli_sum_matrix(n, {{1.0, {{i, p}, {j, p}}}}), psi);
            }
        }
    }
    for (Axis a : kAllAxes) {
        auto &c = o.correlation[a];
        c.triangularView<Eigen::StrictlyLower>() = c.transpose().triangularView<Eigen::StrictlyLower>();
    }

    o.structure_factor = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < n; ++m) {
        const double k = 2.0 * std::numbers::pi * m / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) s += std::cos(k * (i - j)) * o.correlation[Axis::Z](i, j);
        }
        o.structure_factor[m] = s / n;
    }
    o.fluorescence = 0.5 * (n + o.magnetization[Axis::Z].sum());
    return o;
}

inline constexpr double kNormDriftTolerance = 1e-8;

namespace detail {

inline void check_norm(const CVector &v, double before, const char *who) {
    if (std::abs(v.norm() - before) > kNormDriftTolerance) {
        throw AccuracyError(std::string(who) + ": norm drift " + std::to_string(std::abs(v.norm() - before)) +
                            " exceeds tolerance");
    }
}

}  // namespace detail

/// exp(-i H t) |psi>. Small spaces are exponentiated exactly through the
/// eigendecomposition; larger ones use a Taylor series on short sub-steps.
inline QuantumState time_evolve(const SpinHamiltonian &h, const QuantumState &psi, double t) {
    if (psi.dimension() != h.dimension()) throw InvalidArgument("time_evolve: dimension mismatch");
    QuantumState out = psi;
    if (t == 0.0) return out;
    const double before = psi.norm();
    if (h.dimension() <= kDenseEigenLimit) {
        out.amplitudes = HermitianPropagator(h.dense()).apply(psi.amplitudes, t);
    } else {
        out.amplitudes = expm_multiply(h.matrix, CMatrix(psi.amplitudes), t);
    }
    detail::check_norm(out.amplitudes, before, "time_evolve");
    return out;
}

/// Piecewise-constant evolution under H(t), sampled at step midpoints.
inline QuantumState time_evolve(const std::function<SparseC(double)> &h_of_t, const QuantumState &psi, double t0,
                                double t1, double dt) {
    if (!(dt > 0)) throw InvalidArgument("time_evolve: dt must be positive");
    QuantumState out = psi;
    const double before = psi.norm();
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / steps;
    CMatrix v = psi.amplitudes;
    for (int s = 0; s < steps; ++s) {
        const SparseC hm = h_of_t(t0 + (s + 0.5) * h);
        v = expm_multiply(hm, v, h);
    }
    out.amplitudes = v.col(0);
    detail::check_norm(out.amplitudes, before, "time_evolve");
    return out;
}

enum class RampShape { Cosine, Linear };

/// Adiabatic protocol: (1) start in |down...down>, the ground state of a
/// bias field along +z; (2) rotate that field into the transverse direction,
/// which switches on B^x while keeping the spins in the instantaneous ground
/// state; (3) ramp the Ising couplings from 0 to their full value.
struct SweepSchedule {
    double field_time = 20.0;
    double coupling_time = 50.0;
    double dt = 0.01;
    RampShape shape = RampShape::Cosine;
    /// Number of equally spaced checkpoints per phase (plus the start).
    int checkpoints = 10;

    double total_time() const { return field_time + coupling_time; }

    /// Maps s in [0, 1] to a ramp value in [0, 1].
    double ramp(double s) const {
        s = std::clamp(s, 0.0, 1.0);
        return shape == RampShape::Cosine ? 0.5 * (1.0 - std::cos(std::numbers::pi * s)) : s;
    }

    void validate() const {
        if (!(field_time >= 0) || !(coupling_time >= 0)) throw InvalidArgument("sweep times must be >= 0");
        if (!(dt > 0)) throw InvalidArgument("sweep dt must be positive");
        if (checkpoints < 1) throw InvalidArgument("sweep needs at least one checkpoint");
    }
};

struct SweepPoint {
    double time = 0.0;
    double coupling = 0.0;
    double field = 0.0;
    double magnetization = 0.0;
    double nn_correlator = 0.0;
    double gs_overlap = 0.0;
    double fluorescence = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> trajectory;
    QuantumState final_state;
    double final_overlap = 0.0;
};

/// Transverse-field Ising sweep using J^z and B'^x of `model`; other terms are
/// ignored.
inline SweepResult tfim_sweep(const CouplingModel &model, const SweepSchedule &schedule,
                              int guard = kDefaultSpinGuard) {
    schedule.validate();
    const int n = model.n_ions;
    if (n > guard) throw CapacityError("tfim_sweep: " + std::to_string(n) + " spins exceeds guard");
    const double bx = model.field[Axis::X];
    if (bx == 0.0) throw InvalidArgument("tfim_sweep: model has no transverse field B^x");

    std::vector<PauliTerm> ising, xs, zs;
    const auto &jz = model.J[Axis::Z];
    double j_ref = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            if (jz(i, k) != 0.0) ising.push_back({jz(i, k), {{i, Pauli::Z}, {k, Pauli::Z}}});
        }
        if (i + 1 < n) j_ref += jz(i, i + 1) / (n - 1);
        xs.push_back({1.0, {{i, Pauli::X}}});
        zs.push_back({1.0, {{i, Pauli::Z}}});
    }
    const SparseC h_j = pauli_sum_matrix(n, ising);
    const SparseC h_x = pauli_sum_matrix(n, xs);
    const SparseC h_z = pauli_sum_matrix(n, zs);

    // Field direction angle theta(t) and coupling scale lambda(t).
    const double t_f = schedule.field_time;
    const double t_j = schedule.coupling_time;
    auto theta = [&](double t) {
        if (t_f == 0.0) return 0.5 * std::numbers::pi;
        return 0.5 * std::numbers::pi * schedule.ramp(t / t_f);
    };
    auto lambda = [&](double t) { return t <= t_f || t_j == 0.0 ? 0.0 : schedule.ramp((t - t_f) / t_j); };
    auto hamiltonian = [&](double t) -> SparseC {
        const double th = theta(t);
        return lambda(t) * h_j + (bx * std::sin(th)) * h_x + (std::abs(bx) * std::cos(th)) * h_z;
    };

    const double scale = norm_bound(SparseC(h_j)) + n * std::abs(bx);
    if (scale > 0 && schedule.dt > 0.1 * 2.0 * std::numbers::pi / scale) {
        throw AccuracyError("sweep dt too coarse: must be below a tenth of the fastest period (" +
                              std::to_string(0.2 * std::numbers::pi / scale) + ")");
    }

    SweepResult result;
    QuantumState psi = all_down(n);
    auto record = [&](double t) {
        const auto obs = observables(psi);
        const auto gs = ground_state(hamiltonian(t), n);
        SweepPoint p;
        p.time = t;
        p.coupling = lambda(t) * j_ref;
        p.field = bx * std::sin(theta(t));
        p.magnetization = obs.total_magnetization(Axis::Z);
        p.nn_correlator = obs.nearest_neighbor_zz();
        p.gs_overlap = gs.overlap(psi);
        p.fluorescence = obs.fluorescence;
        result.trajectory.push_back(p);
    };

    record(0.0);
    double t = 0.0;
    for (double phase_len : {t_f, t_j}) {
        if (phase_len == 0.0) continue;
        for (int c = 1; c <= schedule.checkpoints; ++c) {
            const double t_next = t + phase_len / schedule.checkpoints;
            psi = time_evolve(hamiltonian, psi, t, t_next, schedule.dt);
            t = t_next;
            record(t);
        }
    }
    result.final_state = psi;
    result.final_overlap = result.trajectory.back().gs_overlap;
    return result;
}

/// Nearest-neighbour chain model with uniform J^z and transverse field B^x.
inline CouplingModel nearest_neighbor_model(int n, double coupling, double transverse_field, bool periodic = false) {
    CouplingModel m = CouplingModel::zeros(n);
    for (int i = 0; i + 1 < n; ++i) m.J[Axis::Z](i, i + 1) = m.J[Axis::Z](i + 1, i) = coupling;
    if (periodic && n > 2) m.J[Axis::Z](0, n - 1) = m.J[Axis::Z](n - 1, 0) = coupling;
    m.field[Axis::X] = transverse_field;
    m.provenance.geometry = periodic ? "nearest_neighbor_ring" : "nearest_neighbor_chain";
    m.provenance.method = "nearest_neighbor";
    return m;
}

struct CrossoverScan {
    std::vector<double> couplings;
    std::vector<double> energies;
    /// dE0/d|J| by Hellmann-Feynman.
    std::vector<double> slope;
    /// -d^2 E0 / d|J|^2 by central differences of `slope`.
    std::vector<double> susceptibility;
    double peak_coupling = 0.0;
};

/// Ferromagnetic TFIM H = -g sum sz_i sz_{i+1} + B sum sx_i over a grid of
/// g = |J|. The ground-energy curvature peaks at the finite-size crossover.
inline CrossoverScan tfim_crossover_scan(int n, double transverse_field, const std::vector<double> &couplings,
                                         bool periodic = false) {
    if (couplings.size() < 3) throw InvalidArgument("tfim_crossover_scan: need at least 3 couplings");
    CrossoverScan scan;
    scan.couplings = couplings;
    const CouplingModel unit = nearest_neighbor_model(n, -1.0, 0.0, periodic);
    std::vector<PauliTerm> zz;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            if (unit.J[Axis::Z](i, k) != 0.0) zz.push_back({-1.0, {{i, Pauli::Z}, {k, Pauli::Z}}});
        }
    }
    std::vector<PauliTerm> xs;
    for (int i = 0; i < n; ++i) xs.push_back({transverse_field, {{i, Pauli::X}}});
    const SparseC h_zz = pauli_sum_matrix(n, zz);
    const SparseC h_x = pauli_sum_matrix(n, xs);
    for (double g : couplings) {
        const SparseC h = g * h_zz + h_x;
        const GroundState gs = ground_state(h, n);
        scan.energies.push_back(gs.energy);
        double s = 0.0;
        for (const auto &st : gs.states) s += expectation(h_zz, st);
        scan.slope.push_back(s / gs.states.size());
    }
    const std::size_t m = couplings.size();
    scan.susceptibility.assign(m, 0.0);
    double best = -1.0;
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double d = (scan.slope[k + 1] - scan.slope[k - 1]) / (couplings[k + 1] - couplings[k - 1]);
        scan.susceptibility[k] = -d;
        if (-d > best) {
            best = -d;
            scan.peak_coupling = couplings[k];
        }
    }
    return scan;
}

/// Process fidelity |Tr(V^dag U)|^2 / d^2.
inline double process_fidelity(const CMatrix &u, const CMatrix &v) {
    const double d = static_cast<double>(u.rows());
    return std::norm((v.adjoint() * u).trace()) / (d * d);
}

inline CMatrix sqrt_swap_gate() {
    CMatrix g = CMatrix::Identity(4, 4);
    const cplx a(0.5, 0.5), b(0.5, -0.5);
    g(1, 1) = a;
    g(1, 2) = b;
    g(2, 1) = b;
    g(2, 2) = a;
    return g;
}

/// Two-qubit rotation exp(-i (phi0 sz_0 + phi1 sz_1) / 2).
inline CMatrix local_z_phases(double phi0, double phi1) {
    CMatrix r = CMatrix::Zero(4, 4);
    for (int b = 0; b < 4; ++b) {
        const double s0 = (b & 2) ? -1.0 : 1.0;
        const double s1 = (b & 1) ? -1.0 : 1.0;
        r(b, b) = std::exp(-kI * 0.5 * (phi0 * s0 + phi1 * s1));
    }
    return r;
}

struct PhaseMatch {
    double fidelity = 0.0;
    double phi0 = 0.0;
    double phi1 = 0.0;
};

/// Maximizes process_fidelity(R(phi0, phi1) U, target) over two local z-phases
/// with a coarse grid followed by successive zoomed grids.
inline PhaseMatch match_up_to_z_phases(const CMatrix &u, const CMatrix &target) {
    PhaseMatch best;
    double c0 = 0.0, c1 = 0.0, span = 2.0 * std::numbers::pi;
    const int grid = 48;
    for (int round = 0; round < 12; ++round) {
        for (int a = 0; a < grid; ++a) {
            for (int b = 0; b < grid; ++b) {
                const double p0 = c0 + span * (static_cast<double>(a) / grid - 0.5);
                const double p1 = c1 + span * (static_cast<double>(b) / grid - 0.5);
                const double f = process_fidelity(local_z_phases(p0, p1) * u, target);
                if (f > best.fidelity) best = {f, p0, p1};
            }
        }
        c0 = best.phi0;
        c1 = best.phi1;
        span *= 4.0 / grid;
    }
    return best;
}

}  // namespace trapspin
