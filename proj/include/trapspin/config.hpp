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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trapspin/couplings.hpp"
#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/fullsim.hpp"
#include "trapspin/spinsim.hpp"
#include "trapspin/types.hpp"

// Experiment files are line oriented:
//
//   # comment
//   [section]
//   key = value            # trailing comment
//   list_key = 0.01, 0.02
//
// Sections: trap, forces, fields, run, output. Keys are unique per section
// and unknown keys are rejected.

namespace trapspin {

struct ConfigEntry {
    std::string value;
    int line = 0;
};

using ConfigSections = std::map<std::string, std::map<std::string, ConfigEntry>>;

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline const std::map<std::string, std::set<std::string>> &config_schema() {
    static const std::map<std::string, std::set<std::string>> schema{
        {"trap", {"geometry", "n_ions", "omega_x", "omega_y", "spacing", "omega_z_si", "omega_z_unit"}},
        {"forces", {"force_x", "force_y", "force_z", "eta_x", "eta_y", "eta_z", "eta_reference"}},
        {"fields", {"b_x", "b_y", "b_z"}},
        {"run",
         {"seed", "n_max", "samples", "beta", "beta_axis", "method", "sweep_model", "sweep_coupling", "sweep_field",
          "periodic", "field_time", "coupling_time", "dt", "ramp", "checkpoints", "eta", "nbar", "y_ratio", "frame",
          "measure"}},
        {"output", {"directory", "formats"}},
    };
    return schema;
}

}  // namespace detail

inline ConfigSections parse_config_sections(const std::string &text) {
    ConfigSections out;
    const auto &schema = detail::config_schema();
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header", line_no);
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!schema.count(section)) {
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]", line_no);
            }
            out[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": '" + key + "' appears before any [section]", line_no);
        }
        if (!schema.at(section).count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "' in [" + section + "]",
                              line_no);
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + section + "." + key + " has no value", line_no);
        }
        if (out[section].count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + section + "." + key, line_no);
        }
        out[section][key] = {value, line_no};
    }
    return out;
}

/// Typed view of an experiment file. Frequencies are ratios to omega_z.
struct ExperimentConfig {
    struct Trap {
        Geometry geometry = Geometry::PaulChain;
        int n_ions = 2;
        double omega_x = 1.4;
        double omega_y = 1.4;
        double spacing = 1.0;
        /// Physical value of omega_z for unit conversion, if annotated.
        std::optional<double> omega_z_si;
        std::string omega_z_unit = "Hz";
    } trap;

    struct Forces {
        PerAxis<std::optional<double>> force;
        PerAxis<std::optional<double>> eta;
        EtaReference eta_reference = EtaReference::ComMode;
    } forces;

    PerAxis<double> fields{};

    struct Run {
        std::uint64_t seed = 1;
        int n_max = 3;
        int samples = 200;
        std::vector<double> beta;
        Axis beta_axis = Axis::X;
        CouplingMethod method = CouplingMethod::ModeSum;
        std::string sweep_model = "nearest_neighbor";
        double sweep_coupling = -5.0;
        double sweep_field = 1.0;
        bool periodic = false;
        SweepSchedule sweep;
        std::vector<double> eta{0.01, 0.02, 0.05};
        std::vector<double> nbar{0.0, 0.25, 0.5, 1.0};
        std::vector<double> y_ratio{1.0, 0.75};
        Frame frame = Frame::Transformed;
        StateMeasure measure = StateMeasure::Haar;
    } run;

    struct Output {
        std::string directory = ".";
        std::vector<std::string> formats{"csv", "json"};
    } output;

    /// Exact bytes the config was parsed from.
    std::string source;

    TrapFrequencies trap_frequencies() const { return {trap.omega_x, trap.omega_y, 1.0}; }

    TrapConfig trap_config() const {
        TrapConfig c;
        c.geometry = trap.geometry;
        c.n_ions = trap.n_ions;
        c.trap_freqs = trap_frequencies();
        c.spacing = trap.spacing;
        return c;
    }

    /// Forces in natural units, converting eta targets with the configured
    /// reference frequency (omega_z, or the centre-of-mass mode omega_alpha).
    ForceSpec force_spec() const {
        ForceSpec f;
        const auto freqs = trap_frequencies();
        for (Axis a : kAllAxes) {
            if (forces.force[a]) f.force[a] = *forces.force[a];
            if (forces.eta[a]) {
                const double w = forces.eta_reference == EtaReference::ComMode ? freqs[a] : 1.0;
                f.force[a] = force_for_eta(*forces.eta[a], w);
            }
            f.bare_field[a] = fields[a];
        }
        return f;
    }

    bool wants(const std::string &format) const {
        for (const auto &f : output.formats) {
            if (f == format) return true;
        }
        return false;
    }
};

namespace detail {

class ConfigReader {
   public:
    explicit ConfigReader(const ConfigSections &s) : sections_(s) {}

    const ConfigEntry *find(const std::string &section, const std::string &key) const {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    [[noreturn]] static void fail(const std::string &section, const std::string &key, const ConfigEntry &e,
                                  const std::string &why) {
        throw ConfigError("line " + std::to_string(e.line) + ": " + section + "." + key + " " + why, e.line);
    }

    static double to_double(const std::string &section, const std::string &key, const ConfigEntry &e,
                            const std::string &text) {
        double v = 0.0;
        const auto *b = text.data();
        const auto *end = b + text.size();
        const auto r = std::from_chars(b, end, v);
        if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
            fail(section, key, e, "expects a number, got '" + text + "'");
        }
        return v;
    }

    void number(const std::string &section, const std::string &key, double &out) const {
        if (const auto *e = find(section, key)) out = to_double(section, key, *e, e->value);
    }

    void number(const std::string &section, const std::string &key, std::optional<double> &out) const {
        if (const auto *e = find(section, key)) out = to_double(section, key, *e, e->value);
    }

    template <typename Int>
    void integer(const std::string &section, const std::string &key, Int &out) const {
        if (const auto *e = find(section, key)) {
            Int v{};
            const auto *b = e->value.data();
            const auto *end = b + e->value.size();
            const auto r = std::from_chars(b, end, v);
            if (r.ec != std::errc() || r.ptr != end) fail(section, key, *e, "expects an integer, got '" + e->value + "'");
            out = v;
        }
    }

    void text(const std::string &section, const std::string &key, std::string &out) const {
        if (const auto *e = find(section, key)) out = e->value;
    }

    void boolean(const std::string &section, const std::string &key, bool &out) const {
        if (const auto *e = find(section, key)) {
            if (e->value == "true") {
                out = true;
            } else if (e->value == "false") {
                out = false;
            } else {
                fail(section, key, *e, "expects true or false, got '" + e->value + "'");
            }
        }
    }

    static std::vector<std::string> split(const std::string &s) {
        std::vector<std::string> parts;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
        return parts;
    }

    void numbers(const std::string &section, const std::string &key, std::vector<double> &out) const {
        if (const auto *e = find(section, key)) {
            out.clear();
            for (const auto &p : split(e->value)) {
                if (p.empty()) fail(section, key, *e, "has an empty list element");
                out.push_back(to_double(section, key, *e, p));
            }
        }
    }

    void words(const std::string &section, const std::string &key, std::vector<std::string> &out) const {
        if (const auto *e = find(section, key)) out = split(e->value);
    }

    /// Runs `convert` on the value, re-raising library errors with the line.
    template <typename T, typename F>
    void choice(const std::string &section, const std::string &key, T &out, F convert) const {
        if (const auto *e = find(section, key)) {
            try {
                out = convert(e->value);
            } catch (const InvalidArgument &err) {
                fail(section, key, *e, err.what());
            }
        }
    }

    [[noreturn]] void reject(const std::string &section, const std::string &key, const std::string &why) const {
        if (const auto *e = find(section, key)) fail(section, key, *e, why);
        throw ConfigError(section + "." + key + " " + why);
    }

   private:
    const ConfigSections &sections_;
};

}  // namespace detail

inline ExperimentConfig parse_config(const std::string &text) {
    const ConfigSections sections = parse_config_sections(text);
    const detail::ConfigReader r(sections);
    ExperimentConfig c;
    c.source = text;

    r.choice("trap", "geometry", c.trap.geometry, [](const std::string &s) { return parse_geometry(s); });
    r.integer("trap", "n_ions", c.trap.n_ions);
    r.number("trap", "omega_x", c.trap.omega_x);
    c.trap.omega_y = c.trap.omega_x;
    r.number("trap", "omega_y", c.trap.omega_y);
    r.number("trap", "spacing", c.trap.spacing);
    r.number("trap", "omega_z_si", c.trap.omega_z_si);
    r.text("trap", "omega_z_unit", c.trap.omega_z_unit);
    if (c.trap.n_ions < 1) r.reject("trap", "n_ions", "must be >= 1");
    if (!(c.trap.omega_x > 0)) r.reject("trap", "omega_x", "must be positive");
    if (!(c.trap.omega_y > 0)) r.reject("trap", "omega_y", "must be positive");
    if (!(c.trap.spacing > 0)) r.reject("trap", "spacing", "must be positive");
    if (c.trap.omega_z_si && !(*c.trap.omega_z_si > 0)) r.reject("trap", "omega_z_si", "must be positive");
    try {
        c.trap_config().validate();
    } catch (const InvalidArgument &e) {
        r.reject("trap", "n_ions", e.what());
    }

    for (Axis a : kAllAxes) {
        const std::string fk = std::string("force_") + axis_name(a);
        const std::string ek = std::string("eta_") + axis_name(a);
        r.number("forces", fk, c.forces.force[a]);
        r.number("forces", ek, c.forces.eta[a]);
        if (c.forces.force[a] && c.forces.eta[a]) r.reject("forces", ek, "conflicts with " + fk);
        if (c.forces.force[a] && !(*c.forces.force[a] >= 0)) r.reject("forces", fk, "must be >= 0");
        if (c.forces.eta[a] && !(*c.forces.eta[a] >= 0)) r.reject("forces", ek, "must be >= 0");
        r.number("fields", std::string("b_") + axis_name(a), c.fields[a]);
    }
    r.choice("forces", "eta_reference", c.forces.eta_reference, [](const std::string &s) { return parse_eta_reference(s); });

    auto &run = c.run;
    r.integer("run", "seed", run.seed);
    r.integer("run", "n_max", run.n_max);
    r.integer("run", "samples", run.samples);
    r.numbers("run", "beta", run.beta);
    r.choice("run", "beta_axis", run.beta_axis, [](const std::string &s) { return parse_axis(s); });
    r.choice("run", "method", run.method, [](const std::string &s) {
        if (s == "mode_sum") return CouplingMethod::ModeSum;
        if (s == "inverse_elasticity") return CouplingMethod::InverseElasticity;
        throw InvalidArgument("expects mode_sum or inverse_elasticity");
    });
    r.choice("run", "sweep_model", run.sweep_model, [](const std::string &s) {
        if (s != "nearest_neighbor" && s != "trap") throw InvalidArgument("expects nearest_neighbor or trap");
        return s;
    });
    r.number("run", "sweep_coupling", run.sweep_coupling);
    r.number("run", "sweep_field", run.sweep_field);
    r.boolean("run", "periodic", run.periodic);
    r.number("run", "field_time", run.sweep.field_time);
    r.number("run", "coupling_time", run.sweep.coupling_time);
    r.number("run", "dt", run.sweep.dt);
    r.choice("run", "ramp", run.sweep.shape, [](const std::string &s) {
        if (s == "cosine") return RampShape::Cosine;
        if (s == "linear") return RampShape::Linear;
        throw InvalidArgument("expects cosine or linear");
    });
    r.integer("run", "checkpoints", run.sweep.checkpoints);
    r.numbers("run", "eta", run.eta);
    r.numbers("run", "nbar", run.nbar);
    r.numbers("run", "y_ratio", run.y_ratio);
    r.choice("run", "frame", run.frame, [](const std::string &s) { return parse_frame(s); });
    r.choice("run", "measure", run.measure, [](const std::string &s) { return parse_measure(s); });
    if (run.n_max < 2) r.reject("run", "n_max", "must be >= 2");
    if (run.samples < 1) r.reject("run", "samples", "must be >= 1");
    for (double b : run.beta) {
        if (!(b > 0)) r.reject("run", "beta", "entries must be positive");
    }
    for (double e : run.eta) {
        if (!(e > 0)) r.reject("run", "eta", "entries must be positive");
    }
    for (double n : run.nbar) {
        if (!(n >= 0)) r.reject("run", "nbar", "entries must be >= 0");
    }
    for (double y : run.y_ratio) {
        if (!(y > 0)) r.reject("run", "y_ratio", "entries must be positive");
    }
    try {
        run.sweep.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(std::string("run: ") + e.what());
    }

    r.text("output", "directory", c.output.directory);
    r.words("output", "formats", c.output.formats);
    for (const auto &f : c.output.formats) {
        if (f != "csv" && f != "json") r.reject("output", "formats", "entries must be csv or json, got '" + f + "'");
    }
    return c;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ExperimentConfig load_config(const std::string &path) { return parse_config(read_file(path)); }

}  // namespace trapspin
