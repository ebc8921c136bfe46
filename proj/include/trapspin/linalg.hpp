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
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trapspin/errors.hpp"
#include "trapspin/rng.hpp"

namespace trapspin {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

/// Max absolute row sum; bounds the spectral radius of a Hermitian matrix.
inline double norm_bound(const SparseC &h) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
        double s = 0.0;
        for (SparseC::InnerIterator it(h, r); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

inline double norm_bound(const CMatrix &h) { return h.cwiseAbs().rowwise().sum().maxCoeff(); }

/// exp(-i H t) X by a Taylor series on sub-steps with |H dt| <= 1.
template <typename Mat>
CMatrix expm_multiply(const Mat &h, const CMatrix &x, double t, double h_norm) {
    const double total = std::abs(t) * h_norm;
    const int steps = std::max(1, static_cast<int>(std::ceil(total)));
    const double dt = t / steps;
    CMatrix y = x;
    CMatrix term;
    for (int s = 0; s < steps; ++s) {
        term = y;
        CMatrix acc = y;
        for (int k = 1; k < 60; ++k) {
            term = (h * term) * (-kI * dt / static_cast<double>(k));
            acc += term;
            if (term.norm() <= 1e-17 * acc.norm()) break;
        }
        y = std::move(acc);
    }
    return y;
}

template <typename Mat>
CMatrix expm_multiply(const Mat &h, const CMatrix &x, double t) {
    return expm_multiply(h, x, t, norm_bound(h));
}

/// Cached eigendecomposition of a dense Hermitian matrix for exact
/// exponentiation at arbitrary times.
class HermitianPropagator {
   public:
    explicit HermitianPropagator(const CMatrix &h) {
        solver_.compute(h);
        if (solver_.info() != Eigen::Success) throw Error("HermitianPropagator: eigensolver failed");
    }

    const Eigen::VectorXd &energies() const { return solver_.eigenvalues(); }
    const CMatrix &eigenvectors() const { return solver_.eigenvectors(); }

    CMatrix apply(const CMatrix &x, double t) const {
        const CMatrix &v = solver_.eigenvectors();
        const CVector phases = (-kI * t * solver_.eigenvalues().cast<cplx>()).array().exp();
        return v * (phases.asDiagonal() * (v.adjoint() * x));
    }

    CMatrix unitary(double t) const {
        const CMatrix &v = solver_.eigenvectors();
        const CVector phases = (-kI * t * solver_.eigenvalues().cast<cplx>()).array().exp();
        return v * phases.asDiagonal() * v.adjoint();
    }

   private:
    Eigen::SelfAdjointEigenSolver<CMatrix> solver_;
};

struct EigenPair {
    double value = 0.0;
    CVector vector;
};

namespace detail {

inline void project_out(CVector &v, const std::vector<CVector> &basis) {
    for (const auto &b : basis) v -= b * b.dot(v);
}

// Lowest eigenpair of H restricted to the complement of `deflate`.
inline EigenPair lanczos_lowest(const SparseC &h, const std::vector<CVector> &deflate, std::uint64_t seed) {
    const Eigen::Index dim = h.rows();
    const int krylov = static_cast<int>(std::min<Eigen::Index>(dim, 120));
    CVector start(dim);
    SplitMix64 rng(seed);
    for (Eigen::Index i = 0; i < dim; ++i) start[i] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);

    EigenPair best;
    for (int restart = 0; restart < 200; ++restart) {
        project_out(start, deflate);
        project_out(start, deflate);
        start.normalize();
        std::vector<CVector> basis{start};
        std::vector<double> alpha, beta;
        for (int k = 0; k < krylov; ++k) {
            CVector w = h * basis[k];
            project_out(w, deflate);
            const double a = basis[k].dot(w).real();
            alpha.push_back(a);
            // Full reorthogonalization, twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto &b : basis) w -= b * b.dot(w);
                project_out(w, deflate);
            }
            const double b = w.norm();
            if (k + 1 == krylov || b < 1e-12) break;
            beta.push_back(b);
            basis.push_back(w / b);
        }
        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
        const Eigen::VectorXd y = tri.eigenvectors().col(0);
        CVector ritz = CVector::Zero(dim);
        for (Eigen::Index i = 0; i < m; ++i) ritz += y[i] * basis[i];
        project_out(ritz, deflate);
        ritz.normalize();
        best.value = tri.eigenvalues()[0];
        best.vector = ritz;
        CVector r = h * ritz;
        project_out(r, deflate);
        best.value = ritz.dot(r).real();
        const double resid = (r - best.value * ritz).norm();
        if (resid < 1e-11 * std::max(1.0, std::abs(best.value))) return best;
        start = ritz;
    }
    return best;
}

}  // namespace detail

/// Lowest eigenvalue and an orthonormal basis of its (numerically) degenerate
/// eigenspace, via Lanczos with explicit deflation.
inline std::vector<EigenPair> lowest_eigenspace(const SparseC &h, double degeneracy_tol, int max_states = 64,
                                                std::uint64_t seed = 0x5eedULL) {
    std::vector<EigenPair> out;
    std::vector<CVector> found;
    const int cap = static_cast<int>(std::min<Eigen::Index>(max_states, h.rows()));
    while (static_cast<int>(out.size()) < cap) {
        EigenPair p = detail::lanczos_lowest(h, found, seed + out.size());
        if (!out.empty() && p.value - out.front().value > degeneracy_tol * std::max(1.0, std::abs(out.front().value))) {
            break;
        }
        found.push_back(p.vector);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace trapspin
