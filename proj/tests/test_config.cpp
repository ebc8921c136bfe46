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
#include <filesystem>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "trapspin/config.hpp"
#include "trapspin/serialize.hpp"

using namespace trapspin;

namespace {

int error_line(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.line();
    }
    return -1;
}

std::string error_message(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsFromEmptyText) {
    const auto c = parse_config("");
    EXPECT_EQ(c.trap.n_ions, 2);
    EXPECT_EQ(c.trap.geometry, Geometry::PaulChain);
    EXPECT_EQ(c.run.seed, 1u);
    EXPECT_EQ(c.run.n_max, 3);
    EXPECT_EQ(c.forces.eta_reference, EtaReference::ComMode);
    EXPECT_TRUE(c.wants("csv"));
    EXPECT_TRUE(c.wants("json"));
}

TEST(Config, ParsesSectionsCommentsAndLists) {
    const auto c = parse_config(
        "# experiment\n"
        "[trap]\n"
        "geometry = microtrap_chain   # inline comment\n"
        "n_ions = 5\n"
        "omega_x = 10\n"
        "spacing = 2.5\n"
        "\n"
        "[forces]\n"
        "force_x = 0.3\n"
        "eta_z = 0.02\n"
        "eta_reference = omega_z\n"
        "[fields]\n"
        "b_z = -0.5\n"
        "[run]\n"
        "beta = 0.01, 0.1\n"
        "beta_axis = y\n"
        "seed = 42\n"
        "frame = lab\n"
        "measure = product\n"
        "ramp = linear\n"
        "[output]\n"
        "directory = results\n"
        "formats = csv\n");
    EXPECT_EQ(c.trap.geometry, Geometry::MicrotrapChain);
    EXPECT_EQ(c.trap.n_ions, 5);
    EXPECT_EQ(c.trap.omega_x, 10.0);
    EXPECT_EQ(c.trap.omega_y, 10.0);
    EXPECT_EQ(c.trap.spacing, 2.5);
    EXPECT_EQ(*c.forces.force[Axis::X], 0.3);
    EXPECT_EQ(*c.forces.eta[Axis::Z], 0.02);
    EXPECT_EQ(c.forces.eta_reference, EtaReference::AxialFrequency);
    EXPECT_EQ(c.fields[Axis::Z], -0.5);
    ASSERT_EQ(c.run.beta.size(), 2u);
    EXPECT_EQ(c.run.beta[1], 0.1);
    EXPECT_EQ(c.run.beta_axis, Axis::Y);
    EXPECT_EQ(c.run.seed, 42u);
    EXPECT_EQ(c.run.frame, Frame::Lab);
    EXPECT_EQ(c.run.measure, StateMeasure::Product);
    EXPECT_EQ(c.run.sweep.shape, RampShape::Linear);
    EXPECT_EQ(c.output.directory, "results");
    EXPECT_TRUE(c.wants("csv"));
    EXPECT_FALSE(c.wants("json"));
}

TEST(Config, ForceSpecFromEta) {
    const auto c = parse_config("[trap]\nomega_x = 1.4\n[forces]\neta_x = 0.05\neta_reference = omega_z\n");
    EXPECT_NEAR(c.force_spec().force[Axis::X], 0.05 * std::sqrt(2.0), 1e-15);
    const auto com = parse_config("[trap]\nomega_x = 1.4\n[forces]\neta_x = 0.05\n");
    EXPECT_NEAR(com.force_spec().force[Axis::X], 0.05 * std::sqrt(2.0) * std::pow(1.4, 1.5), 1e-14);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("[trap]\nn_ions = 2\nbogus = 1\n"), 3);
    EXPECT_EQ(error_line("[trap]\n[nowhere]\n"), 2);
    EXPECT_EQ(error_line("n_ions = 2\n"), 1);
    EXPECT_EQ(error_line("[trap]\nn_ions = 2\nn_ions = 3\n"), 3);
    EXPECT_EQ(error_line("[trap]\n\nn_ions =\n"), 3);
    EXPECT_EQ(error_line("[trap]\nn_ions = two\n"), 2);
    EXPECT_EQ(error_line("[trap]\nthis line has no equals\n"), 2);
    EXPECT_EQ(error_line("[run]\nbeta = 0.1, -1\n"), 2);
    EXPECT_EQ(error_line("[run]\nn_max = 1\n"), 2);
}

TEST(Config, ZeroIonsNamesField) {
    const std::string msg = error_message("[trap]\nn_ions = 0\n");
    EXPECT_NE(msg.find("trap.n_ions"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(Config, EtaAndForceConflict) {
    EXPECT_THROW(parse_config("[forces]\neta_x = 0.1\nforce_x = 0.2\n"), ConfigError);
}

TEST(Config, UnknownChoiceRejected) {
    EXPECT_THROW(parse_config("[trap]\ngeometry = ring\n"), ConfigError);
    EXPECT_THROW(parse_config("[run]\nframe = rotating\n"), ConfigError);
    EXPECT_THROW(parse_config("[output]\nformats = csv, xml\n"), ConfigError);
}

TEST(Config, SourceBytesKept) {
    const std::string text = "[trap]\nn_ions = 3\n";
    EXPECT_EQ(parse_config(text).source, text);
}

TEST(Serialize, CouplingRoundTripIsExact) {
    TrapConfig cfg;
    cfg.n_ions = 6;
    cfg.trap_freqs = {3.1, 2.9, 1.0};
    ForceSpec s;
    s.force[Axis::X] = 0.37;
    s.force[Axis::Z] = 0.11;
    s.bare_field[Axis::Y] = 1.0 / 3.0;
    const auto m = compile_couplings(make_crystal(cfg), cfg.trap_freqs, s);
    const auto back = coupling_from_json(json::parse(to_json(m).dump()));
    EXPECT_EQ(back.n_ions, m.n_ions);
    for (Axis a : kAllAxes) EXPECT_TRUE(back.J[a] == m.J[a]);
    EXPECT_TRUE(back.field == m.field);
    EXPECT_EQ(back.energy_offset, m.energy_offset);
    EXPECT_EQ(back.provenance.method, m.provenance.method);
    EXPECT_TRUE(back.provenance.force == m.provenance.force);
    EXPECT_TRUE(back.provenance.trap_freqs == m.provenance.trap_freqs);
}

TEST(Serialize, CouplingSchemaChecked) {
    auto j = to_json(CouplingModel::zeros(2));
    j["schema"] = "other/9";
    EXPECT_THROW(coupling_from_json(j), InvalidArgument);
    EXPECT_THROW(coupling_from_json(json::object()), InvalidArgument);
}

TEST(Serialize, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Serialize, ContentHash) {
    EXPECT_EQ(content_hash("abc"), content_hash("abc"));
    EXPECT_NE(content_hash("abc"), content_hash("abd"));
    EXPECT_NE(content_hash("abc"), content_hash("abc "));
    EXPECT_EQ(content_hash("").size(), 16u);
}

TEST(Serialize, VersionRecord) {
    const auto v = version_record("x", true);
    EXPECT_EQ(v["schema"], "trapspin.version/1");
    EXPECT_FALSE(v["version"].get<std::string>().empty());
    EXPECT_FALSE(v["build"].get<std::string>().empty());
    EXPECT_EQ(v["config_hash"], content_hash("x"));
    EXPECT_EQ(v["units"]["hbar"], 1);
    EXPECT_EQ(v["units"]["m"], 1);
    EXPECT_EQ(v["units"]["e2"], 1);
    EXPECT_EQ(v["units"]["omega_z"], 1);
    EXPECT_EQ(version_record("", false)["config_hash"], "none");
}

TEST(Serialize, CsvTable) {
    CsvTable t({"a", "b"});
    t.row(std::vector<double>{1.0, 0.25}).row(std::vector<std::string>{"x", "y"});
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.str(), "a,b\n1,0.25\nx,y\n");
    EXPECT_THROW(t.row(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Config, SampleConfigsParse) {
    int seen = 0;
    for (const auto &e : std::filesystem::directory_iterator(TRAPSPIN_SAMPLES_DIR)) {
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++seen;
    }
    EXPECT_GT(seen, 0);
}
