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
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapspin/couplings.hpp"
#include "trapspin/crystal.hpp"
#include "trapspin/errors.hpp"
#include "trapspin/fullsim.hpp"
#include "trapspin/modes.hpp"
#include "trapspin/types.hpp"

namespace trapspin {

using json = nlohmann::json;

inline constexpr const char *kCouplingSchema = "trapspin.coupling/1";
inline constexpr const char *kVersionString = "1.0.0";

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

/// FNV-1a 64-bit, rendered as 16 hex digits.
inline std::string content_hash(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json matrix_to_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json &j, Eigen::Index n) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
        throw InvalidArgument("coupling json: matrix must have n_ions rows");
    }
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw InvalidArgument("coupling json: matrix must be square");
        }
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

inline json per_axis_to_json(const PerAxis<double> &v) {
    return json{{"x", v[Axis::X]}, {"y", v[Axis::Y]}, {"z", v[Axis::Z]}};
}

inline PerAxis<double> per_axis_from_json(const json &j) {
    PerAxis<double> v;
    for (Axis a : kAllAxes) v[a] = j.at(std::string(1, axis_name(a))).get<double>();
    return v;
}

inline json to_json(const CouplingModel &m) {
    json j;
    j["schema"] = kCouplingSchema;
    j["units"] = "hbar*omega_z";
    j["n_ions"] = m.n_ions;
    json jm;
    for (Axis a : kAllAxes) jm[std::string(1, axis_name(a))] = matrix_to_json(m.J[a]);
    j["J"] = jm;
    j["field"] = per_axis_to_json(m.field);
    j["energy_offset"] = m.energy_offset;
    const auto &p = m.provenance;
    j["provenance"] = {
        {"geometry", p.geometry},
        {"trap_freqs", {{"x", p.trap_freqs.x}, {"y", p.trap_freqs.y}, {"z", p.trap_freqs.z}}},
        {"force", per_axis_to_json(p.force)},
        {"bare_field", per_axis_to_json(p.bare_field)},
        {"method", p.method},
    };
    return j;
}

inline CouplingModel coupling_from_json(const json &j) {
    try {
        if (j.at("schema").get<std::string>() != kCouplingSchema) {
            throw InvalidArgument("coupling json: unsupported schema '" + j.at("schema").get<std::string>() + "'");
        }
        CouplingModel m;
        m.n_ions = j.at("n_ions").get<int>();
        if (m.n_ions < 1) throw InvalidArgument("coupling json: n_ions must be >= 1");
        for (Axis a : kAllAxes) m.J[a] = matrix_from_json(j.at("J").at(std::string(1, axis_name(a))), m.n_ions);
        m.field = per_axis_from_json(j.at("field"));
        m.energy_offset = j.at("energy_offset").get<double>();
        const auto &p = j.at("provenance");
        m.provenance.geometry = p.at("geometry").get<std::string>();
        const auto &tf = p.at("trap_freqs");
        m.provenance.trap_freqs = {tf.at("x").get<double>(), tf.at("y").get<double>(), tf.at("z").get<double>()};
        m.provenance.force = per_axis_from_json(p.at("force"));
        m.provenance.bare_field = per_axis_from_json(p.at("bare_field"));
        m.provenance.method = p.at("method").get<std::string>();
        return m;
    } catch (const json::exception &e) {
        throw InvalidArgument(std::string("coupling json: ") + e.what());
    }
}

inline json to_json(const ModeData &m) {
    json j;
    j["axis"] = std::string(1, axis_name(m.axis));
    j["frequencies"] = std::vector<double>(m.frequencies.data(), m.frequencies.data() + m.frequencies.size());
    j["mode_matrix"] = matrix_to_json(m.mode_matrix);
    j["zero_modes"] = m.zero_modes;
    return j;
}

inline json to_json(const FidelityReport &r) {
    return json{
        {"schema", "trapspin.fidelity/1"},
        {"fidelity", r.fidelity},
        {"error", r.error},
        {"standard_error", r.standard_error},
        {"n_samples", r.n_samples},
        {"closed_form_fidelity", r.closed_form_fidelity},
        {"seed", r.seed},
        {"frame", r.frame},
        {"measure", r.measure},
        {"eta", r.eta},
        {"nbar", r.nbar},
        {"truncated_nbar", r.truncated_nbar},
        {"n_max", r.n_max},
        {"omega_x", r.omega_x},
        {"omega_y", r.omega_y},
        {"omega_z", r.omega_z},
        {"duration", r.duration},
        {"coupling", r.coupling},
        {"top_level_population", r.top_level_population},
        {"warnings", r.warnings},
    };
}

inline json units_json() {
    return json{
        {"hbar", 1},
        {"m", 1},
        {"e2", 1},
        {"omega_z", 1},
        {"length", "(e^2 / (m omega_z^2))^(1/3)"},
        {"energy", "hbar*omega_z"},
        {"time", "1/omega_z"},
    };
}

inline json version_record(const std::string &config_bytes, bool has_config) {
    return json{
        {"schema", "trapspin.version/1"},
        {"name", "trapspin"},
        {"version", kVersionString},
        {"build", std::string("trapspin-") + kVersionString + "-cxx" + std::to_string(__cplusplus / 100)},
        {"config_hash", has_config ? content_hash(config_bytes) : std::string("none")},
        {"units", units_json()},
    };
}

/// CSV with a header row; numbers use format_double.
class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable &row(const std::vector<std::string> &cells) {
        if (cells.size() != header_.size()) throw InvalidArgument("csv: row width does not match header");
        rows_.push_back(cells);
        return *this;
    }

    CsvTable &row(const std::vector<double> &cells) {
        std::vector<std::string> text;
        text.reserve(cells.size());
        for (double v : cells) text.push_back(format_double(v));
        return row(text);
    }

    std::string str() const {
        std::string out;
        auto line = [&out](const std::vector<std::string> &cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (k) out += ',';
                out += cells[k];
            }
            out += '\n';
        };
        line(header_);
        for (const auto &r : rows_) line(r);
        return out;
    }

    std::size_t size() const { return rows_.size(); }

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_json(const std::string &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace trapspin
