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
#include <cstdlib>
#include <vector>

#include <Eigen/Dense>

#include "trapspin/errors.hpp"

namespace trapspin {

/// Least-squares slope of log|y| against log x.
inline double fit_loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_loglog_slope: need >= 2 matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0) || y[k] == 0.0) throw InvalidArgument("fit_loglog_slope: points must be nonzero");
        const double lx = std::log(x[k]);
        const double ly = std::log(std::abs(y[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw InvalidArgument("fit_loglog_slope: x values must differ");
    return (n * sxy - sx * sy) / den;
}

/// J(i0, i0 + r) / J(i0, i0 + 1) for r = 1 .. r_max, with i0 the chain centre.
struct DecayProfile {
    int center = 0;
    std::vector<double> separation;
    std::vector<double> coupling;
    std::vector<double> ratio;

    /// Power-law exponent of |J| against r.
    double exponent() const { return fit_loglog_slope(separation, coupling); }
    double second_neighbor_ratio() const { return ratio.size() > 1 ? ratio[1] : 0.0; }
};

inline DecayProfile decay_profile(const Eigen::MatrixXd &j, int r_max = 10) {
    const int n = static_cast<int>(j.rows());
    if (n < 2) throw InvalidArgument("decay_profile: need at least 2 sites");
    DecayProfile p;
    p.center = (n - 1) / 2;
    const int reach = std::min(r_max, n - 1 - p.center);
    const double nn = j(p.center, p.center + 1);
    for (int r = 1; r <= reach; ++r) {
        p.separation.push_back(r);
        p.coupling.push_back(j(p.center, p.center + r));
        p.ratio.push_back(nn == 0.0 ? 0.0 : j(p.center, p.center + r) / nn);
    }
    return p;
}

}  // namespace trapspin
