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

// Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "trapspin.hpp"

using namespace trapspin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

IonCrystal paul(int n) {
    TrapConfig cfg;
    cfg.n_ions = n;
    return make_crystal(cfg);
}

TrapFrequencies radial_for_beta(const IonCrystal &c, double beta_target) {
    const double w = frequency_for_beta(c, Axis::X, beta_target);
    return {w, w, 1.0};
}

Outcome identity_check() {
    double worst = 0.0;
    for (int n : {2, 10, 50, 100}) {
        const auto c = paul(n);
        const auto f = radial_for_beta(c, 0.01);
        for (Axis a : {Axis::X, Axis::Z}) {
            const auto k = elasticity_matrix(c, a, f);
            const auto m = coupling_from_modes(normal_modes(k), 1.0);
            const auto inv = coupling_from_inverse_K(k, 1.0);
            worst = std::max(worst, (m.J - inv.J).lpNorm<Eigen::Infinity>());
        }
    }
    return {worst < 1e-10, "max |J_modes - J_invK| = " + fmt("%.3e", worst) + " (tol 1e-10)"};
}

Eigen::MatrixXd radial_couplings(int n, double beta_target) {
    const auto c = paul(n);
    return coupling_from_inverse_K(elasticity_matrix(c, Axis::X, radial_for_beta(c, beta_target)), 1.0).J;
}

Outcome dipolar_exponent() {
    const double e = decay_profile(radial_couplings(100, 0.01)).exponent();
    return {std::abs(e + 3.0) <= 0.15, "N=100 beta=0.01 exponent = " + fmt("%.4f", e) + " (target -3 +- 0.15)"};
}

Outcome second_neighbor() {
    const double r = decay_profile(radial_couplings(100, 0.1)).second_neighbor_ratio();
    return {std::abs(r) < 0.04, "beta=0.1 |J_i,i+2 / J_i,i+1| = " + fmt("%.4f", std::abs(r)) + " (limit 0.04)"};
}

Outcome axial_long_range() {
    const auto c = paul(50);
    const auto j = coupling_from_inverse_K(elasticity_matrix(c, Axis::Z, {}), 1.0).J;
    bool negative = true;
    for (int i = 0; i < 50; ++i) {
        for (int k = 0; k < 50; ++k) {
            if (i != k && !(j(i, k) < 0.0)) negative = false;
        }
    }
    const double ratio = std::abs(j(0, 49)) / std::abs(j(0, 1));
    return {negative && ratio > 0.5, std::string("N=50 axial all negative = ") + (negative ? "yes" : "no") +
                                         ", |J_1,50|/|J_1,2| = " + fmt("%.4f", ratio) + " (limit > 0.5)"};
}

Outcome two_ion_modes() {
    const double wx = 1.4;
    const TrapFrequencies f{wx, wx, 1.0};
    TrapConfig cfg;
    cfg.n_ions = 2;
    cfg.trap_freqs = f;
    const auto c = make_crystal(cfg);
    const auto z = normal_modes(elasticity_matrix(c, Axis::Z, f)).frequencies;
    const auto x = normal_modes(elasticity_matrix(c, Axis::X, f)).frequencies;
    const double err = std::max({std::abs(z[0] - 1.0), std::abs(z[1] - std::sqrt(3.0)),
                                 std::abs(x[0] - std::sqrt(wx * wx - 1.0)), std::abs(x[1] - wx)});
    return {err < 1e-9, "max deviation from analytic = " + fmt("%.3e", err) + " (tol 1e-9)"};
}

Outcome sqrt_swap() {
    const double j = 0.01;
    auto m = CouplingModel::zeros(2);
    m.J[Axis::X](0, 1) = m.J[Axis::X](1, 0) = j;
    m.J[Axis::Y] = m.J[Axis::X];
    const CMatrix u =
        HermitianPropagator(build_spin_hamiltonian(m).dense()).unitary(std::numbers::pi / (8.0 * j));
    const auto best = match_up_to_z_phases(u, sqrt_swap_gate());
    const double infidelity = 1.0 - best.fidelity;
    return {infidelity < 1e-10, "best infidelity over local z-phases = " + fmt("%.6f", infidelity) + " (tol 1e-10)"};
}

// Fidelity grid shared by the scaling and flatness checks.
class Fig3Grid {
   public:
    double error(double y_ratio, double eta, double nbar) {
        const auto key = std::make_tuple(y_ratio, eta, nbar);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        XYGateParams p;
        p.omega_x = 1.4;
        p.y_ratio = y_ratio;
        p.eta = eta;
        p.nbar = nbar;
        p.n_max = 3;
        p.n_samples = 200;
        p.seed = 1;
        p.eta_reference = EtaReference::AxialFrequency;
        const double e = xy_gate_experiment(p).error;
        cache_[key] = e;
        return e;
    }

   private:
    std::map<std::tuple<double, double, double>, double> cache_;
};

Outcome eta_scaling(Fig3Grid &grid) {
    std::vector<double> etas{0.01, 0.02, 0.05}, errs;
    for (double eta : etas) errs.push_back(grid.error(0.75, eta, 0.25));
    const double slope = fit_loglog_slope(etas, errs);
    const double e05 = errs.back();
    const bool ok = std::abs(slope - 2.0) <= 0.3 && e05 >= 3e-3 && e05 <= 3e-2;
    return {ok, "slope = " + fmt("%.3f", slope) + " (target 2 +- 0.3), E(0.05) = " + fmt("%.3e", e05) +
                    " (band [3e-3, 3e-2]); E = " + fmt("%.3e", errs[0]) + ", " + fmt("%.3e", errs[1]) + ", " +
                    fmt("%.3e", errs[2])};
}

Outcome nbar_flatness(Fig3Grid &grid) {
    const std::vector<double> nbars{0.0, 0.25, 0.5, 1.0};
    std::vector<double> sym, asym;
    for (double n : nbars) {
        sym.push_back(grid.error(1.0, 0.05, n));
        asym.push_back(grid.error(0.75, 0.05, n));
    }
    bool increasing = true;
    for (std::size_t k = 1; k < sym.size(); ++k) increasing = increasing && sym[k] > sym[k - 1];
    const double ratio = sym.back() / sym.front();
    double mean = 0.0;
    for (double e : asym) mean += e / asym.size();
    const double spread = (*std::max_element(asym.begin(), asym.end()) - *std::min_element(asym.begin(), asym.end())) / mean;
    const bool ok = increasing && ratio >= 2.0 && ratio <= 4.0 && spread < 0.25;
    std::string d = std::string("symmetric increasing = ") + (increasing ? "yes" : "no") +
                    ", E(1)/E(0) = " + fmt("%.2f", ratio) + " (band [2, 4]), asymmetric spread/mean = " +
                    fmt("%.3f", spread) + " (limit 0.25); symmetric E =";
    for (double e : sym) d += " " + fmt("%.3e", e);
    d += "; asymmetric E =";
    for (double e : asym) d += " " + fmt("%.3e", e);
    return {ok, d};
}

Outcome frame_consistency() {
    std::vector<double> etas{0.01, 0.02, 0.05, 0.1}, res;
    for (double eta : etas) {
        XYGateParams p;
        p.eta = eta;
        p.eta_reference = EtaReference::AxialFrequency;
        const auto s = xy_gate_setup(p);
        res.push_back(frame_check(build_full_hamiltonian(s.crystal, s.modes, s.force, s.freqs, 8)).coupling_residual);
    }
    const double exponent = fit_loglog_slope(etas, res);

    const TrapFrequencies f{1.4, 1.05, 1.0};
    TrapConfig cfg;
    cfg.n_ions = 2;
    cfg.trap_freqs = f;
    const auto c = make_crystal(cfg);
    ForceSpec force;
    force.force[Axis::X] = force_for_eta(0.05, 1.0);
    const auto single = frame_check(
        build_full_hamiltonian(c, {normal_modes(elasticity_matrix(c, Axis::X, f))}, force, f, 8));
    const double noise = std::max(1e-10, std::sqrt(single.truncation_population));
    const bool quiet = single.cross_term <= noise;
    const bool ok = std::abs(exponent - 3.0) <= 0.5 && quiet;
    return {ok, "two-axis residual exponent = " + fmt("%.3f", exponent) + " (target 3 +- 0.5; residuals " +
                    fmt("%.2e", res[0]) + ".." + fmt("%.2e", res.back()) + "), single-axis cross term = " +
                    fmt("%.2e", single.cross_term) + " vs noise " + fmt("%.2e", noise)};
}

Outcome tfim() {
    std::vector<double> g;
    for (int k = 0; k <= 60; ++k) g.push_back(0.2 + 0.025 * k);
    const double peak = tfim_crossover_scan(10, 1.0, g).peak_coupling;
    SweepSchedule s;
    s.dt = 0.005;
    const double overlap = tfim_sweep(nearest_neighbor_model(8, -5.0, 1.0), s).final_overlap;
    const bool ok = std::abs(peak - 1.0) <= 0.3 && overlap > 0.99;
    return {ok, "N=10 peak J/B = " + fmt("%.3f", peak) + " (target 1 +- 0.3), N=8 sweep overlap = " +
                    fmt("%.5f", overlap) + " (limit > 0.99)"};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string &cli) {
    const fs::path dir = fs::temp_directory_path() / "trapspin_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg, std::ios::binary) << "[trap]\nn_ions = 6\nomega_x = 4\n"
                                            "[forces]\neta_x = 0.05\n"
                                            "[run]\nseed = 5\nsamples = 40\neta = 0.02, 0.05\nnbar = 0, 0.5\n"
                                            "y_ratio = 0.75\ndt = 0.01\nsweep_coupling = -2\n";
    int compared = 0;
    bool same = true;
    for (const char *sub : {"equilibrium", "modes", "couplings", "ising-sweep", "fidelity-scan"}) {
        std::vector<fs::path> outs;
        for (const char *tag : {"a", "b"}) {
            const fs::path out = dir / (std::string(sub) + "_" + tag);
            const std::string cmd = "\"" + cli + "\" " + sub + " --config \"" + cfg.string() + "\" --out \"" +
                                    out.string() + "\" --seed 5 --threads " + (tag[0] == 'a' ? "1" : "3") +
                                    " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                return {false, std::string(sub) + " exited with status " + std::to_string(status)};
            }
            outs.push_back(out);
        }
        for (const auto &e : fs::directory_iterator(outs[0])) {
            ++compared;
            same = same && slurp(e.path()) == slurp(outs[1] / e.path().filename());
        }
    }
    return {same && compared > 0,
            std::to_string(compared) + " output files compared across reruns, identical = " + (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char **argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance PATH_TO_TRAPSPIN_CLI\n");
        return 2;
    }
    const std::string cli = argv[1];
    Fig3Grid grid;
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"mode-sum and inverse-elasticity couplings agree", identity_check},
        {"dipolar decay at beta = 0.01", dipolar_exponent},
        {"second-neighbour suppression at beta = 0.1", second_neighbor},
        {"axial long-range ferromagnetic couplings", axial_long_range},
        {"two-ion normal modes", two_ion_modes},
        {"XY evolution equals sqrt(SWAP) up to z-phases", sqrt_swap},
        {"error scales as eta^2 (asymmetric trap)", [&] { return eta_scaling(grid); }},
        {"error versus mean phonon number", [&] { return nbar_flatness(grid); }},
        {"transformed-frame couplings", frame_consistency},
        {"TFIM crossover and adiabatic sweep", tfim},
        {"CLI reruns are byte-identical", [&] { return determinism(cli); }},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s [%zu] %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
