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

// mzi: simulate, fit and plot two-photon interferometer scans.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "mzi/fitting.hpp"
#include "mzi/io/csv.hpp"
#include "mzi/io/plot.hpp"
#include "mzi/io/report.hpp"
#include "mzi/scenario/config.hpp"
#include "mzi/scenario/run.hpp"
#include "mzi/selftest.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "MZI_OUT_DIR";

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kFit = 3, kIo = 4 };

int report_error(const char* category, int code, const std::exception& e) {
    std::cerr << "error[" << category << "]: " << e.what() << '\n';
    return code;
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool expectation = false;
    std::optional<std::string> out_dir;
};

int cmd_simulate(const SimulateArgs& args) {
    mzi::scenario::ScenarioConfig cfg = mzi::scenario::load_config(args.config);
    if (args.seed) cfg.seed = *args.seed;
    if (args.expectation) cfg.expectation_mode = true;
    std::optional<fs::path> override_dir;
    if (args.out_dir) override_dir = *args.out_dir;
    const fs::path dir = mzi::scenario::resolve_out_dir(cfg, override_dir, std::getenv(kOutDirEnv));
    const auto outcome = mzi::scenario::run_scenario(cfg, dir);
    for (const auto& w : outcome.warnings) spdlog::warn("{}", w);
    for (const auto& f : outcome.files) spdlog::info("wrote {}", f.string());
    const auto& fits = outcome.report.at("fits");
    for (const char* which : {"raw", "subtracted"}) {
        if (fits.contains(which)) {
            const auto& v = fits.at(which).at("visibility");
            std::cout << which << " visibility = " << v.at("value").get<double>() << " +/- "
                      << v.at("error").get<double>() << '\n';
        }
    }
    if (outcome.report.contains("fitted_calibration")) {
        const auto& c = outcome.report.at("fitted_calibration");
        std::cout << "alpha = " << c.at("alpha_deg_per_mw").get<double>() << " +/- "
                  << c.at("alpha_err_deg_per_mw").get<double>() << " deg/mW\n";
    }
    return kOk;
}

struct FitArgs {
    std::string csv;
    std::string model;
    double alpha = 0.579;
    double resistance = 850.0;
    double phi0 = 0.0;
    bool phase_axis = false;
    std::optional<std::string> output;
};

int cmd_fit(const FitArgs& args) {
    const bool dip = args.model == "dip";
    const mzi::ScanResult scan = mzi::io::read_scan_csv(args.csv, dip ? mzi::ScanKind::hom : mzi::ScanKind::noon);
    mzi::io::json report;
    report["csv"] = args.csv;
    report["kind"] = dip ? "hom" : "noon";
    if (dip) {
        report["fit"] = mzi::io::to_json(mzi::fit_gaussian_dip(scan));
    } else if (args.phase_axis) {
        report["fit"] = mzi::io::to_json(mzi::fit_two_phi_fringe_phase(scan));
    } else {
        const mzi::ThermoOpticCalibration cal{args.alpha, args.resistance, args.phi0};
        report["calibration"] = mzi::io::to_json(cal);
        report["fit"] = mzi::io::to_json(mzi::fit_two_phi_fringe(scan, cal));
    }
    std::cout << report.dump(2) << '\n';
    if (args.output) mzi::io::write_json(*args.output, report);
    return kOk;
}

struct PlotArgs {
    std::string csv;
    std::optional<std::string> report;
    std::optional<std::string> output;
    std::optional<std::string> kind;
};

int cmd_plot(const PlotArgs& args) {
    std::optional<mzi::io::json> report;
    if (args.report) report = mzi::io::read_json(*args.report);

    std::string kind_text = args.kind.value_or("");
    if (kind_text.empty() && report && report->contains("kind")) kind_text = report->at("kind").get<std::string>();
    if (kind_text.empty()) kind_text = "hom";
    const auto kind = mzi::scan_kind_from_string(kind_text);
    if (!kind) throw mzi::ConfigError("--kind must be one of hom, noon, singles, background");

    const mzi::ScanResult scan = mzi::io::read_scan_csv(args.csv, *kind);
    std::function<double(double)> curve;
    if (report) {
        std::optional<mzi::io::json> fit;
        if (report->contains("fit")) {
            fit = report->at("fit");
        } else if (report->contains("fits")) {
            const auto& fits = report->at("fits");
            const char* which = scan.background_subtracted ? "subtracted" : "raw";
            if (fits.contains(which)) fit = fits.at(which);
        }
        std::optional<mzi::ThermoOpticCalibration> cal;
        if (report->contains("calibration")) cal = mzi::io::calibration_from_json(report->at("calibration"));
        if (fit) curve = mzi::io::curve_from_fit_json(*fit, cal);
    }
    const fs::path out = args.output ? fs::path(*args.output) : fs::path(args.csv).replace_extension(".svg");
    const auto status = mzi::io::emit_plot(scan, curve, mzi::io::default_labels(*kind), out);
    for (const auto& w : status.warnings) spdlog::warn("{}", w);
    spdlog::info("wrote {}", out.string());
    return kOk;
}

int cmd_selftest(double perturb_eta) {
    mzi::SelftestHooks hooks;
    if (perturb_eta != 0.0) {
        hooks.balanced_eta += perturb_eta;
        hooks.hom_cancellation_eta += perturb_eta;
    }
    const mzi::SelftestReport report = mzi::run_selftest(hooks);
    for (const auto& s : report.suites) {
        std::cout << (s.passed ? "[PASS] " : "[FAIL] ") << s.name << "  cases=" << s.cases
                  << "  max_deviation=" << s.max_deviation << "  tolerance=" << s.tolerance << '\n';
    }
    return report.all_passed() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate and analyse two-photon interference in an integrated Mach-Zehnder interferometer"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario config: scan, background, fit, plots");
    simulate->add_option("config", sim.config, "Scenario config file")->required();
    simulate->add_option("--seed", sim.seed, "Override the config seed");
    simulate->add_flag("--expectation-mode", sim.expectation, "Use Poisson means instead of sampled counts");
    simulate->add_option("--out-dir", sim.out_dir, std::string("Output directory (default: config, then $") +
                                                       kOutDirEnv + ", then .)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a scan CSV and print the fit report as JSON");
    fit_cmd->add_option("csv", fit.csv, "Scan CSV")->required();
    fit_cmd->add_option("--model", fit.model, "dip or fringe")->required()->check(CLI::IsMember({"dip", "fringe"}));
    fit_cmd->add_option("--alpha", fit.alpha, "Heater calibration, deg/mW (fringe)");
    fit_cmd->add_option("--resistance", fit.resistance, "Heater resistance, ohm (fringe)");
    fit_cmd->add_option("--phi0", fit.phi0, "Heater phase offset, rad (fringe)");
    fit_cmd->add_flag("--phase-axis", fit.phase_axis, "Settings are phases in rad rather than volts (fringe)");
    fit_cmd->add_option("-o,--output", fit.output, "Also write the report to this file");

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render a scan CSV (and optional fit report) as SVG");
    plot_cmd->add_option("csv", plot.csv, "Scan CSV")->required();
    plot_cmd->add_option("fit-report", plot.report, "Fit report JSON from 'simulate' or 'fit'");
    plot_cmd->add_option("-o,--output", plot.output, "SVG path (default: CSV path with .svg)");
    plot_cmd->add_option("--kind", plot.kind, "hom, noon, singles or background (axis labels)");

    double perturb_eta = 0.0;
    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant suites");
    selftest->add_option("--perturb-eta", perturb_eta, "Offset the balanced coupler reflectivity (test hook)")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*fit_cmd) return cmd_fit(fit);
        if (*plot_cmd) return cmd_plot(plot);
        if (*selftest) return cmd_selftest(perturb_eta);
    } catch (const mzi::ConfigError& e) {
        return report_error("config", kConfig, e);
    } catch (const mzi::FitFailure& e) {
        return report_error("fit", kFit, e);
    } catch (const mzi::IoError& e) {
        return report_error("io", kIo, e);
    } catch (const mzi::ValidationError& e) {
        return report_error("config", kConfig, e);
    } catch (const std::exception& e) {
        return report_error("internal", kFailure, e);
    }
    return kFailure;
}
