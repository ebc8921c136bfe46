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

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "trapspin.hpp"

namespace fs = std::filesystem;
using namespace trapspin;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCapacity = 4;

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

ExperimentConfig load(const Options &o) {
    if (o.config_path.empty()) throw ConfigError("--config is required for this subcommand");
    ExperimentConfig c = load_config(o.config_path);
    if (o.seed) c.run.seed = *o.seed;
    if (!o.out_dir.empty()) c.output.directory = o.out_dir;
    return c;
}

std::string out_path(const ExperimentConfig &c, const std::string &name) {
    fs::create_directories(c.output.directory);
    return (fs::path(c.output.directory) / name).string();
}

void note(const std::string &path) { std::cout << "wrote " << path << "\n"; }

int cmd_equilibrium(const Options &o) {
    const auto c = load(o);
    const IonCrystal crystal = make_crystal(c.trap_config());
    if (c.wants("csv")) {
        CsvTable t({"index", "x", "y", "z"});
        for (std::size_t i = 0; i < crystal.size(); ++i) {
            const auto &p = crystal.positions[i];
            t.row(std::vector<double>{static_cast<double>(i), p.x(), p.y(), p.z()});
        }
        const auto path = out_path(c, "positions.csv");
        write_text(path, t.str());
        note(path);
    }
    if (c.wants("json")) {
        json pos = json::array();
        for (const auto &p : crystal.positions) pos.push_back({p.x(), p.y(), p.z()});
        json j{{"schema", "trapspin.equilibrium/1"},
               {"geometry", geometry_name(crystal.config.geometry)},
               {"n_ions", crystal.size()},
               {"units", units_json()},
               {"residual", crystal.residual},
               {"iterations", crystal.iterations},
               {"positions", pos}};
        if (crystal.config.geometry != Geometry::HexLattice && crystal.size() > 1) {
            j["central_spacing"] = central_spacing(crystal);
        }
        const auto path = out_path(c, "equilibrium.json");
        write_json(path, j);
        note(path);
    }
    return 0;
}

std::vector<Axis> supported_axes(const IonCrystal &crystal) {
    if (crystal.config.geometry == Geometry::HexLattice) return {Axis::Y};
    return {Axis::X, Axis::Y, Axis::Z};
}

int cmd_modes(const Options &o) {
    const auto c = load(o);
    const IonCrystal crystal = make_crystal(c.trap_config());
    const auto freqs = c.trap_frequencies();
    CsvTable t({"axis", "mode", "frequency"});
    json axes = json::array();
    for (Axis a : supported_axes(crystal)) {
        const ModeData m = normal_modes(elasticity_matrix(crystal, a, freqs));
        for (Eigen::Index k = 0; k < m.frequencies.size(); ++k) {
            t.row({std::string(1, axis_name(a)), std::to_string(k), format_double(m.frequencies[k])});
        }
        json jm = to_json(m);
        if (crystal.size() > 1) jm["beta"] = beta(crystal, a, freqs).value;
        axes.push_back(jm);
    }
    if (c.wants("csv")) {
        const auto path = out_path(c, "modes.csv");
        write_text(path, t.str());
        note(path);
    }
    if (c.wants("json")) {
        const auto path = out_path(c, "modes.json");
        write_json(path, json{{"schema", "trapspin.modes/1"}, {"units", units_json()}, {"axes", axes}});
        note(path);
    }
    return 0;
}

int cmd_couplings(const Options &o) {
    const auto c = load(o);
    const IonCrystal crystal = make_crystal(c.trap_config());
    const auto freqs = c.trap_frequencies();
    const ForceSpec force = c.force_spec();
    const CouplingModel model = compile_couplings(crystal, freqs, force, c.run.method);
    if (c.wants("json")) {
        const auto path = out_path(c, "couplings.json");
        write_json(path, to_json(model));
        note(path);
    }

    // Decay curves from the chain centre.
    CsvTable curve({"beta", "axis", "r", "ratio"});
    CsvTable fit({"beta", "axis", "exponent", "second_neighbor_ratio"});
    auto add_profile = [&](double b, Axis a, const Eigen::MatrixXd &j) {
        const DecayProfile p = decay_profile(j);
        const std::string ax(1, axis_name(a));
        for (std::size_t k = 0; k < p.ratio.size(); ++k) {
            curve.row({format_double(b), ax, format_double(p.separation[k]), format_double(p.ratio[k])});
        }
        const std::string exponent = p.separation.size() >= 2 ? format_double(p.exponent()) : "nan";
        fit.row({format_double(b), ax, exponent, format_double(p.second_neighbor_ratio())});
    };
    if (crystal.size() >= 3 && crystal.config.geometry != Geometry::HexLattice) {
        if (!c.run.beta.empty()) {
            const Axis a = c.run.beta_axis;
            if (a == Axis::Z) throw ConfigError("run.beta_axis must be x or y: omega_z is the unit of frequency");
            const double f = force.force[a] > 0 ? force.force[a] : 1.0;
            for (double b : c.run.beta) {
                TrapFrequencies fq = freqs;
                (a == Axis::X ? fq.x : fq.y) = frequency_for_beta(crystal, a, b);
                const ElasticityMatrix k = elasticity_matrix(crystal, a, fq);
                const AxisCoupling j = c.run.method == CouplingMethod::ModeSum ? coupling_from_modes(normal_modes(k), f)
                                                                               : coupling_from_inverse_K(k, f);
                add_profile(b, a, j.J);
            }
        } else {
            for (Axis a : kAllAxes) {
                if (force.force[a] == 0.0) continue;
                add_profile(beta(crystal, a, freqs).value, a, model.J[a]);
            }
        }
    }
    if (c.wants("csv") && curve.size() > 0) {
        auto path = out_path(c, "fig2.csv");
        write_text(path, curve.str());
        note(path);
        path = out_path(c, "fig2_fit.csv");
        write_text(path, fit.str());
        note(path);
    }
    return 0;
}

int cmd_ising_sweep(const Options &o) {
    const auto c = load(o);
    CouplingModel model;
    if (c.run.sweep_model == "nearest_neighbor") {
        model = nearest_neighbor_model(c.trap.n_ions, c.run.sweep_coupling, c.run.sweep_field, c.run.periodic);
    } else {
        const IonCrystal crystal = make_crystal(c.trap_config());
        model = compile_couplings(crystal, c.trap_frequencies(), c.force_spec(), c.run.method);
    }
    const SweepResult r = tfim_sweep(model, c.run.sweep);
    if (c.wants("csv")) {
        CsvTable t({"time", "J", "B", "magnetization", "nn_correlator", "gs_overlap"});
        for (const auto &p : r.trajectory) {
            t.row(std::vector<double>{p.time, p.coupling, p.field, p.magnetization, p.nn_correlator, p.gs_overlap});
        }
        const auto path = out_path(c, "sweep.csv");
        write_text(path, t.str());
        note(path);
    }
    if (c.wants("json")) {
        const auto &last = r.trajectory.back();
        const auto path = out_path(c, "sweep.json");
        write_json(path, json{{"schema", "trapspin.sweep/1"},
                              {"n_ions", model.n_ions},
                              {"model", c.run.sweep_model},
                              {"total_time", c.run.sweep.total_time()},
                              {"dt", c.run.sweep.dt},
                              {"final_overlap", r.final_overlap},
                              {"final_nn_correlator", last.nn_correlator},
                              {"final_fluorescence", last.fluorescence}});
        note(path);
    }
    return 0;
}

struct GridPoint {
    double y_ratio;
    double eta;
    double nbar;
};

int cmd_fidelity_scan(const Options &o) {
    const auto c = load(o);
    std::vector<GridPoint> grid;
    for (double y : c.run.y_ratio) {
        for (double e : c.run.eta) {
            for (double n : c.run.nbar) grid.push_back({y, e, n});
        }
    }
    std::vector<FidelityReport> reports(grid.size());
    std::vector<std::exception_ptr> failures(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            XYGateParams p;
            p.omega_x = c.trap.omega_x;
            p.y_ratio = grid[k].y_ratio;
            p.eta = grid[k].eta;
            p.nbar = grid[k].nbar;
            p.n_max = c.run.n_max;
            p.n_samples = c.run.samples;
            p.seed = c.run.seed;
            p.eta_reference = c.forces.eta_reference;
            p.frame = c.run.frame;
            p.measure = c.run.measure;
            try {
                reports[k] = xy_gate_experiment(p);
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, o.threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (failures[k]) {
            std::cerr << "failed at grid point y_ratio=" << format_double(grid[k].y_ratio)
                      << " eta=" << format_double(grid[k].eta) << " nbar=" << format_double(grid[k].nbar) << "\n";
            std::rethrow_exception(failures[k]);
        }
    }

    CsvTable scan({"eta", "nbar", "y_ratio", "E", "stderr", "J", "T"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto &r = reports[k];
        scan.row(std::vector<double>{r.eta, r.nbar, grid[k].y_ratio, r.error, r.standard_error, r.coupling, r.duration});
    }
    CsvTable slopes({"y_ratio", "nbar", "slope"});
    json slope_json = json::array();
    if (c.run.eta.size() >= 2) {
        for (double y : c.run.y_ratio) {
            for (double n : c.run.nbar) {
                std::vector<double> xs, es;
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    if (grid[k].y_ratio == y && grid[k].nbar == n) {
                        xs.push_back(grid[k].eta);
                        es.push_back(reports[k].error);
                    }
                }
                const double s = fit_loglog_slope(xs, es);
                slopes.row(std::vector<double>{y, n, s});
                slope_json.push_back({{"y_ratio", y}, {"nbar", n}, {"slope", s}});
            }
        }
    }
    if (c.wants("csv")) {
        auto path = out_path(c, "fidelity_scan.csv");
        write_text(path, scan.str());
        note(path);
        if (slopes.size() > 0) {
            path = out_path(c, "fidelity_slope.csv");
            write_text(path, slopes.str());
            note(path);
        }
    }
    if (c.wants("json")) {
        json reps = json::array();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            json j = to_json(reports[k]);
            j["y_ratio"] = grid[k].y_ratio;
            if (c.trap.omega_z_si) {
                j["coupling_si"] = units::energy_to_frequency(reports[k].coupling, *c.trap.omega_z_si);
                j["si_unit"] = c.trap.omega_z_unit;
            }
            reps.push_back(j);
        }
        const auto path = out_path(c, "fidelity_report.json");
        write_json(path, json{{"schema", "trapspin.fidelity_scan/1"},
                              {"version", version_record(c.source, true)},
                              {"seed", c.run.seed},
                              {"eta_reference", eta_reference_name(c.forces.eta_reference)},
                              {"reports", reps},
                              {"slopes", slope_json}});
        note(path);
    }
    return 0;
}

int cmd_version(const Options &o) {
    const bool has_config = !o.config_path.empty();
    const std::string bytes = has_config ? read_file(o.config_path) : std::string();
    std::cout << version_record(bytes, has_config).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"trapspin: effective spin models in trapped-ion crystals"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&opt](CLI::App *sub, bool config_required) {
        auto *c = sub->add_option("--config", opt.config_path, "Experiment config file");
        if (config_required) c->required();
        sub->add_option("--out", opt.out_dir, "Output directory (overrides output.directory)");
        sub->add_option("--seed", opt.seed, "Random seed (overrides run.seed)");
        sub->add_option("--threads", opt.threads, "Worker threads for parameter scans")->check(CLI::PositiveNumber);
    };
    struct Sub {
        const char *name;
        const char *help;
        int (*fn)(const Options &);
        bool needs_config;
    };
    const Sub subs[] = {
        {"equilibrium", "Equilibrium positions", cmd_equilibrium, true},
        {"modes", "Normal modes per axis", cmd_modes, true},
        {"couplings", "Spin-spin couplings and decay curves", cmd_couplings, true},
        {"ising-sweep", "Adiabatic transverse-field Ising sweep", cmd_ising_sweep, true},
        {"fidelity-scan", "Two-ion XY simulation error scan", cmd_fidelity_scan, true},
        {"version", "Build and unit information", cmd_version, false},
    };
    int (*chosen)(const Options &) = nullptr;
    for (const auto &s : subs) {
        auto *sub = app.add_subcommand(s.name, s.help);
        add_common(sub, s.needs_config);
        sub->callback([&chosen, fn = s.fn] { chosen = fn; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    try {
        return chosen(opt);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapacityError &e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const InvalidArgument &e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
