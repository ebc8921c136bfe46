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

#include <cmath>

#include <gtest/gtest.h>

#include "trapspin/modes.hpp"

using namespace trapspin;

namespace {

IonCrystal paul(int n, TrapFrequencies f = {}) {
    TrapConfig cfg;
    cfg.n_ions = n;
    cfg.trap_freqs = f;
    return make_crystal(cfg);
}

}  // namespace

TEST(Elasticity, TwoIonAxial) {
    // r^3 = 2 for the two-ion chain: K = [[1 + 2/2, -2/2], [-1, 2]].
    const auto c = paul(2);
    const auto k = elasticity_matrix(c, Axis::Z, {});
    EXPECT_EQ(k.c_alpha, -2.0);
    EXPECT_NEAR(k.entries(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(k.entries(1, 1), 2.0, 1e-12);
    EXPECT_NEAR(k.entries(0, 1), -1.0, 1e-12);
    EXPECT_NEAR(k.entries(1, 0), -1.0, 1e-12);
}

TEST(Elasticity, TwoIonTransverse) {
    const auto c = paul(2);
    const TrapFrequencies f{1.4, 1.4, 1.0};
    const auto k = elasticity_matrix(c, Axis::X, f);
    EXPECT_EQ(k.c_alpha, 1.0);
    EXPECT_NEAR(k.entries(0, 0), 1.96 - 0.5, 1e-12);
    EXPECT_NEAR(k.entries(0, 1), 0.5, 1e-12);
}

TEST(Elasticity, SymmetricForAllAxes) {
    const auto c = paul(9, {3.0, 2.5, 1.0});
    for (Axis a : kAllAxes) {
        const auto k = elasticity_matrix(c, a, {3.0, 2.5, 1.0});
        EXPECT_LT((k.entries - k.entries.transpose()).norm(), 1e-14);
    }
}

TEST(Elasticity, CoincidentIonsRaise) {
    auto c = make_microtrap_chain(3, 1.0);
    c.positions[2] = c.positions[1];
    EXPECT_THROW(elasticity_matrix(c, Axis::X, {}), InvalidGeometry);
}

TEST(Elasticity, HexOnlyTransverse) {
    const auto c = make_hex_lattice(1, 1.0);
    EXPECT_THROW(elasticity_matrix(c, Axis::X, {}), InvalidArgument);
    EXPECT_THROW(elasticity_matrix(c, Axis::Z, {}), InvalidArgument);
    EXPECT_NO_THROW(elasticity_matrix(c, Axis::Y, {1.0, 5.0, 1.0}));
}

TEST(NormalModes, TwoIonAxialFrequencies) {
    const auto m = normal_modes(elasticity_matrix(paul(2), Axis::Z, {}));
    EXPECT_NEAR(m.frequencies[0], 1.0, 1e-12);
    EXPECT_NEAR(m.frequencies[1], std::sqrt(3.0), 1e-12);
    EXPECT_EQ(m.zero_modes, 0);
}

TEST(NormalModes, TwoIonTransverseFrequencies) {
    // Rocking mode: sqrt(omega_x^2 - 1); COM: omega_x.
    const auto m = normal_modes(elasticity_matrix(paul(2), Axis::X, {1.4, 1.4, 1.0}));
    EXPECT_NEAR(m.frequencies[0], std::sqrt(0.96), 1e-12);
    EXPECT_NEAR(m.frequencies[0], 0.98, 1e-3);
    EXPECT_NEAR(m.frequencies[1], 1.4, 1e-12);
}

TEST(NormalModes, ReconstructsElasticityMatrix) {
    for (Axis a : kAllAxes) {
        const TrapFrequencies f{6.0, 7.0, 1.0};
        const auto k = elasticity_matrix(paul(12, f), a, f);
        const auto m = normal_modes(k);
        const Eigen::MatrixXd rebuilt =
            m.mode_matrix * m.frequencies.array().square().matrix().asDiagonal() * m.mode_matrix.transpose();
        EXPECT_LT((rebuilt - k.entries).norm(), 1e-10);
        EXPECT_LT((m.mode_matrix.transpose() * m.mode_matrix - Eigen::MatrixXd::Identity(12, 12)).norm(), 1e-12);
        for (Eigen::Index i = 1; i < m.frequencies.size(); ++i) EXPECT_GE(m.frequencies[i], m.frequencies[i - 1]);
    }
}

TEST(NormalModes, CenterOfMassModes) {
    const int n = 15;
    const TrapFrequencies f{12.0, 12.0, 1.0};
    const auto c = paul(n, f);
    const auto axial = normal_modes(elasticity_matrix(c, Axis::Z, f));
    EXPECT_NEAR(axial.frequencies[0], 1.0, 1e-10);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(axial.mode_matrix(i, 0), 1.0 / std::sqrt(n), 1e-10);
    const auto radial = normal_modes(elasticity_matrix(c, Axis::X, f));
    EXPECT_NEAR(radial.frequencies[n - 1], 12.0, 1e-10);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(radial.mode_matrix(i, n - 1), 1.0 / std::sqrt(n), 1e-10);
}

TEST(NormalModes, ZigZagSoftensAsRadialTrapWeakens) {
    const int n = 10;
    double previous = 1e300;
    for (double wx : {12.0, 10.0, 8.0, 6.0}) {
        const TrapFrequencies f{wx, wx, 1.0};
        const auto m = normal_modes(elasticity_matrix(paul(n, f), Axis::X, f));
        EXPECT_LT(m.frequencies[0], previous);
        previous = m.frequencies[0];
        // Lowest transverse mode alternates in sign between neighbours.
        for (int i = 1; i < n; ++i) EXPECT_LT(m.mode_matrix(i, 0) * m.mode_matrix(i - 1, 0), 0.0);
    }
}

TEST(NormalModes, UnstableTransverseRaises) {
    const TrapFrequencies f{0.5, 0.5, 1.0};
    try {
        normal_modes(elasticity_matrix(paul(10, f), Axis::X, f));
        FAIL() << "expected instability";
    } catch (const InstabilityError &e) {
        EXPECT_LT(e.eigenvalue(), 0.0);
    }
}

TEST(NormalModes, SignConvention) {
    const TrapFrequencies f{4.0, 4.0, 1.0};
    for (Axis a : kAllAxes) {
        const auto m = normal_modes(elasticity_matrix(paul(7, f), a, f));
        for (Eigen::Index col = 0; col < m.mode_matrix.cols(); ++col) {
            const auto v = m.mode_matrix.col(col);
            Eigen::Index best = 0;
            for (Eigen::Index r = 1; r < v.size(); ++r) {
                if (std::abs(v[r]) > std::abs(v[best]) + 1e-12) best = r;
            }
            EXPECT_GT(v[best], 0.0);
        }
    }
    // Stretch mode (1, -1)/sqrt(2): tie goes to the first index.
    const auto m = normal_modes(elasticity_matrix(paul(2), Axis::Z, {}));
    EXPECT_GT(m.mode_matrix(0, 1), 0.0);
    EXPECT_LT(m.mode_matrix(1, 1), 0.0);
}

TEST(NormalModes, ClampsZeroModes) {
    ElasticityMatrix k;
    k.axis = Axis::X;
    k.entries.resize(2, 2);
    k.entries << 1.0, -1.0, -1.0, 1.0;
    const auto m = normal_modes(k);
    EXPECT_EQ(m.zero_modes, 1);
    EXPECT_EQ(m.frequencies[0], 0.0);
    EXPECT_NEAR(m.frequencies[1], std::sqrt(2.0), 1e-12);
}

TEST(NormalModes, SingleIon) {
    const TrapFrequencies f{1.4, 1.05, 1.0};
    const auto c = paul(1, f);
    EXPECT_NEAR(normal_modes(elasticity_matrix(c, Axis::X, f)).frequencies[0], 1.4, 1e-15);
    EXPECT_NEAR(normal_modes(elasticity_matrix(c, Axis::Y, f)).frequencies[0], 1.05, 1e-15);
    EXPECT_NEAR(normal_modes(elasticity_matrix(c, Axis::Z, f)).frequencies[0], 1.0, 1e-15);
}

TEST(Beta, MicrotrapOracle) {
    const auto c = make_microtrap_chain(5, 2.0);
    const TrapFrequencies f{10.0, 1.0, 1.0};
    const auto b = beta(c, Axis::X, f);
    EXPECT_NEAR(b.value, 1.0 / (100.0 * 8.0), 1e-15);
    EXPECT_EQ(b.d0_used, 2.0);
    EXPECT_NEAR(beta(c, Axis::Z, f).value, 2.0 / 8.0, 1e-15);
}

TEST(Beta, PaulChainUsesCentralSpacing) {
    const TrapFrequencies f{10.0, 10.0, 1.0};
    const auto c = paul(2, f);
    const auto b = beta(c, Axis::X, f);
    EXPECT_NEAR(b.d0_used, std::cbrt(2.0), 1e-12);
    EXPECT_NEAR(b.value, 1.0 / (100.0 * 2.0), 1e-12);
}

TEST(Beta, FrequencyForBetaInverts) {
    const auto c = paul(20);
    for (double target : {0.001, 0.01, 0.1, 1.0}) {
        const double w = frequency_for_beta(c, Axis::X, target);
        EXPECT_NEAR(beta(c, Axis::X, {w, w, 1.0}).value, target, 1e-12 * target);
    }
    EXPECT_THROW(frequency_for_beta(c, Axis::X, 0.0), InvalidArgument);
}

TEST(Beta, NeedsTwoIons) { EXPECT_THROW(beta(paul(1), Axis::X, {}), InvalidArgument); }
