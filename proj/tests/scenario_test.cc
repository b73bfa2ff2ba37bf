// Copyright 2026 The mzi-twophoton Authors
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

#include "mzi/io/csv.hpp"
#include "mzi/io/plot.hpp"
#include "mzi/io/report.hpp"
#include "mzi/scenario/config.hpp"
#include "mzi/scenario/run.hpp"

namespace fs = std::filesystem;
using namespace mzi;
using namespace mzi::scenario;

namespace {

const fs::path kConfigDir = MZI_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Fresh scratch directory per test.
class ScratchDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("mzi_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }

    // Runs the CLI; returns its exit status. stdout+stderr land in `output`.
    int cli(const std::string& args, std::string* output = nullptr) const {
        const fs::path log = dir_ / "cli.log";
        const std::string cmd = std::string(MZI_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        if (output != nullptr) *output = slurp(log);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

const char* kMinimalHom = R"(kind: hom
seed: 5
scan:
  start: -1000
  stop: 1000
  points: 41
source:
  pair_rate: 800
  background_rate: 20
)";

}  // namespace

TEST(Config, bundled_configs_parse) {
    const ScenarioConfig hom = load_config(kConfigDir / "fig3.config");
    EXPECT_EQ(hom.kind, ScanKind::hom);
    EXPECT_NEAR(hom.eta, 0.5, 1e-15);
    EXPECT_EQ(hom.grid.points, 601);
    EXPECT_EQ(hom.fit_model, FitModel::dip);
    EXPECT_EQ(hom.photon_b.polarization_overlap, 0.95);
    EXPECT_TRUE(hom.measure_background);

    const ScenarioConfig noon = load_config(kConfigDir / "fig4.config");
    EXPECT_EQ(noon.kind, ScanKind::noon);
    EXPECT_EQ(noon.calibration.alpha_deg_per_mw, 0.579);
    EXPECT_EQ(noon.calibration.resistance_ohm, 850.0);
    EXPECT_EQ(noon.fit_model, FitModel::fringe);

    EXPECT_EQ(load_config(kConfigDir / "singles.config").fit_model, FitModel::calibrate);
}

TEST(Config, defaults) {
    const ScenarioConfig c = parse_config_text(kMinimalHom);
    EXPECT_EQ(c.eta, 0.5);
    EXPECT_EQ(c.integration_time_s, 1.0);
    EXPECT_EQ(c.fit_model, FitModel::dip);
    EXPECT_FALSE(c.expectation_mode);
    EXPECT_EQ(c.grid.values().size(), 41u);
    EXPECT_EQ(c.grid.values().front(), -1000.0);
    EXPECT_EQ(c.grid.values().back(), 1000.0);
}

TEST(Config, rejects_unknown_key_with_position) {
    try {
        parse_config_text(std::string(kMinimalHom) + "circuit:\n  etta: 0.5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("etta"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), 10);  // zero-based line of "etta"
    }
}

TEST(Config, rejects_bad_values) {
    auto bad = [](const std::string& text) { EXPECT_THROW(parse_config_text(text), ConfigError) << text; };
    bad("kind: dip\n");
    bad("kind: hom\n");  // no scan section
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 0}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10, integration_time_s: -1}\n");
    bad("kind: noon\nscan: {start: -1, stop: 1, points: 10}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10}\ncircuit: {eta: 0.5, mzi_delta_phi_rad: 1}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10}\ncircuit: {eta: 1.5}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10}\ncircuit: {crossing_angle_deg: 4}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10}\nfit: {model: fringe}\n");
    bad("kind: hom\nscan: {start: 0, stop: 1, points: 10}\nsource: {background_table: [1, 2]}\n");
    bad("kind: noon\nscan: {start: 0, stop: 1, points: 3}\nsource: {background_table: [1, 2]}\n");
    bad("kind: hom\nscan: [1, 2\n");
}

TEST(Config, crossing_angle_maps_to_reflectivity) {
    const auto c = parse_config_text(std::string(kMinimalHom) + "circuit:\n  crossing_angle_deg: 2.45\n");
    EXPECT_EQ(c.eta, 0.5);
}

TEST(Config, missing_file_is_io_error) { EXPECT_THROW(load_config("/nonexistent/x.config"), IoError); }

TEST(Config, out_dir_precedence) {
    ScenarioConfig c = parse_config_text(kMinimalHom);
    EXPECT_EQ(resolve_out_dir(c, std::nullopt, nullptr), fs::path("."));
    EXPECT_EQ(resolve_out_dir(c, std::nullopt, "env"), fs::path("env"));
    c.out_dir = "cfg";
    EXPECT_EQ(resolve_out_dir(c, std::nullopt, "env"), fs::path("cfg"));
    EXPECT_EQ(resolve_out_dir(c, fs::path("cli"), "env"), fs::path("cli"));
}

TEST(Csv, round_trip_is_exact) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    ScanResult s;
    s.kind = ScanKind::noon;
    s.background_subtracted = true;
    for (int i = 0; i < 50; ++i) s.records.push_back({u(rng), u(rng), 1.0 + i, u(rng), u(rng), u(rng), u(rng)});
    std::stringstream ss;
    io::write_scan_csv(ss, s);
    EXPECT_EQ(io::read_scan_csv(ss, ScanKind::noon), s);
}

TEST(Csv, schema_and_errors) {
    ScanResult s;
    s.records.push_back({0.5, 3.0, 1.0, 3.0, std::sqrt(3.0), 0.0, 0.0});
    std::stringstream ss;
    io::write_scan_csv(ss, s);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "setting,counts,integration_time_s,rate_per_s,rate_err_per_s");
    std::stringstream bad("setting,counts\n1,2\n");
    EXPECT_THROW(io::read_scan_csv(bad, ScanKind::hom), IoError);
    std::stringstream junk("setting,counts,integration_time_s,rate_per_s,rate_err_per_s\n1,x,1,1,1\n");
    EXPECT_THROW(io::read_scan_csv(junk, ScanKind::hom), IoError);
}

TEST_F(ScratchDir, plot_without_fit_warns) {
    ScanResult s;
    for (int i = 0; i < 5; ++i) s.records.push_back({double(i), 10.0, 1.0, 10.0 + i, 3.0, 0.0, 0.0});
    const auto status = io::emit_plot(s, {}, io::default_labels(ScanKind::hom), dir_ / "p.svg");
    EXPECT_FALSE(status.fit_drawn);
    ASSERT_EQ(status.warnings.size(), 1u);
    EXPECT_EQ(status.warnings[0], "no fitted curve available; plotting data only");
    const std::string svg = slurp(dir_ / "p.svg");
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_EQ(svg.find("class=\"fit\""), std::string::npos);
}

TEST_F(ScratchDir, hom_scenario_writes_outputs) {
    ScenarioConfig c = parse_config_text(kMinimalHom);
    c.prefix = "t";
    const ScenarioOutcome out = run_scenario(c, dir_);
    for (const char* f : {"t_raw.csv", "t_background.csv", "t_subtracted.csv", "t_raw.svg", "t_subtracted.svg",
                          "t_fit.json"}) {
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    }
    const io::json report = io::read_json(dir_ / "t_fit.json");
    EXPECT_EQ(report.at("kind"), "hom");
    EXPECT_EQ(report.at("fits").at("raw").at("model"), "gaussian_dip");
    EXPECT_TRUE(report.at("fits").contains("subtracted"));
    EXPECT_EQ(io::read_scan_csv(dir_ / "t_raw.csv", ScanKind::hom), out.data.raw);
    EXPECT_TRUE(out.warnings.empty());
}

TEST_F(ScratchDir, expectation_mode_scenario_is_exact) {
    ScenarioConfig c = parse_config_text(std::string(kMinimalHom) + "expectation_mode: true\n");
    const ScenarioData d = simulate(c);
    ASSERT_EQ(d.background.size(), 1u);
    EXPECT_DOUBLE_EQ(d.background[0].rate, 20.0);
    ASSERT_TRUE(d.subtracted);
    // first point sits 1000 fs off the dip: P = (1 - M) / 2
    PhotonWavepacket b = c.photon_b;
    b.delay_fs -= 1000.0;
    const double m = mode_overlap(c.photon_a, b);
    EXPECT_NEAR(d.subtracted->records.front().rate, 800.0 * 0.5 * (1.0 - m), 1e-9);
}

TEST_F(ScratchDir, same_seed_gives_identical_files) {
    const fs::path cfg = write("c.config", std::string(kMinimalHom) + "output: {prefix: r}\n");
    ASSERT_EQ(cli("simulate " + cfg.string() + " --out-dir " + (dir_ / "a").string()), 0);
    ASSERT_EQ(cli("simulate " + cfg.string() + " --out-dir " + (dir_ / "b").string()), 0);
    ASSERT_EQ(cli("simulate " + cfg.string() + " --seed 6 --out-dir " + (dir_ / "c").string()), 0);
    for (const char* f : {"r_raw.csv", "r_background.csv", "r_subtracted.csv", "r_fit.json"}) {
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    EXPECT_NE(slurp(dir_ / "a" / "r_raw.csv"), slurp(dir_ / "c" / "r_raw.csv"));
}

TEST_F(ScratchDir, cli_config_errors_exit_2) {
    const fs::path cfg = write("bad.config", "kind: hom\nscan: {start: 0, stop: 1, points: 0}\n");
    std::string out;
    EXPECT_EQ(cli("simulate " + cfg.string() + " --out-dir " + dir_.string(), &out), 2);
    EXPECT_NE(out.find("error[config]"), std::string::npos) << out;
    EXPECT_NE(out.find("points"), std::string::npos) << out;
    EXPECT_EQ(cli("simulate " + (dir_ / "missing.config").string(), &out), 4);
}

TEST_F(ScratchDir, cli_fit_and_plot) {
    const fs::path cfg = write("c.config", std::string(kMinimalHom) + "output: {prefix: r, plot: false}\n");
    ASSERT_EQ(cli("simulate " + cfg.string() + " --out-dir " + dir_.string()), 0);
    std::string out;
    ASSERT_EQ(cli("fit " + (dir_ / "r_subtracted.csv").string() + " --model dip -o " + (dir_ / "f.json").string(),
                  &out),
              0)
        << out;
    const io::json fit = io::read_json(dir_ / "f.json");
    EXPECT_EQ(fit.at("fit").at("model"), "gaussian_dip");
    ASSERT_EQ(cli("plot " + (dir_ / "r_subtracted.csv").string() + " " + (dir_ / "f.json").string() + " -o " +
                      (dir_ / "f.svg").string(),
                  &out),
              0)
        << out;
    EXPECT_NE(slurp(dir_ / "f.svg").find("class=\"fit\""), std::string::npos);
    ASSERT_EQ(cli("plot " + (dir_ / "r_raw.csv").string() + " -o " + (dir_ / "d.svg").string(), &out), 0);
    EXPECT_NE(out.find("no fitted curve available"), std::string::npos) << out;
}

TEST_F(ScratchDir, cli_fit_failure_exit_3) {
    const fs::path csv = write("flat.csv", "setting,counts,integration_time_s,rate_per_s,rate_err_per_s\n"
                                           "0,1,1,1,1\n1,1,1,1,1\n2,1,1,1,1\n");
    EXPECT_EQ(cli("fit " + csv.string() + " --model fringe"), 3);
}

TEST_F(ScratchDir, cli_selftest) {
    std::string out;
    EXPECT_EQ(cli("selftest", &out), 0);
    EXPECT_NE(out.find("[PASS] hom_cancellation"), std::string::npos) << out;
    EXPECT_EQ(cli("selftest --perturb-eta 1e-3", &out), 1);
    EXPECT_NE(out.find("[FAIL] visibility_laws"), std::string::npos) << out;
}
