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

#ifndef MZI_SCENARIO_RUN_HPP
#define MZI_SCENARIO_RUN_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "mzi/experiment.hpp"
#include "mzi/fitting.hpp"
#include "mzi/io/csv.hpp"
#include "mzi/io/plot.hpp"
#include "mzi/io/report.hpp"
#include "mzi/scenario/config.hpp"

namespace mzi::scenario {

/// In-memory results of a scenario, before anything is written.
struct ScenarioData {
    ScanResult raw;
    std::optional<ScanResult> background_runs;
    std::vector<BackgroundEstimate> background;
    std::optional<ScanResult> subtracted;
    std::optional<FitResult> raw_fit;
    std::optional<FitResult> subtracted_fit;
    std::optional<CalibrationFit> calibration_fit;
};

struct ScenarioOutcome {
    ScenarioData data;
    std::vector<std::filesystem::path> files;
    io::json report;
    std::vector<std::string> warnings;
};

/// Runs the scan and background measurement described by `c`. No fitting.
inline ScenarioData simulate(const ScenarioConfig& c) {
    ScenarioData d;
    BackgroundConfig bg_cfg{c.source(), c.background_time_per_side_s, c.expectation_mode};
    switch (c.kind) {
        case ScanKind::hom: {
            HomScanConfig h;
            h.eta = c.eta;
            h.input = c.input();
            h.delays_fs = c.grid.values();
            h.integration_time_s = c.integration_time_s;
            h.source = c.source();
            h.expectation_mode = c.expectation_mode;
            d.raw = run_hom_scan(h);
            break;
        }
        case ScanKind::noon: {
            NoonScanConfig n;
            n.voltages = c.grid.values();
            n.calibration = c.calibration;
            n.input = c.input();
            n.couplers = c.couplers;
            n.integration_time_s = c.integration_time_s;
            n.source = c.source();
            n.background_table = c.background_table;
            n.expectation_mode = c.expectation_mode;
            d.raw = run_noon_scan(n);
            break;
        }
        case ScanKind::singles: {
            SinglesScanConfig s;
            s.voltages = c.grid.values();
            s.calibration = c.calibration;
            s.input_mode = c.input_mode;
            s.detect_mode = c.detect_mode;
            s.couplers = c.couplers;
            s.integration_time_s = c.integration_time_s;
            s.source = c.source();
            s.expectation_mode = c.expectation_mode;
            d.raw = run_singles_scan(s);
            break;
        }
        case ScanKind::background: {
            d.background_runs = measure_background_runs(bg_cfg);
            d.raw = *d.background_runs;
            d.background.push_back(background_from_runs(*d.background_runs));
            return d;
        }
    }
    if (c.measure_background) {
        if (!c.background_table.empty()) {
            d.background = measure_background_profile(bg_cfg, c.background_table);
        } else {
            d.background_runs = measure_background_runs(bg_cfg);
            d.background.push_back(background_from_runs(*d.background_runs));
        }
        d.subtracted = subtract_background(d.raw, d.background);
    }
    return d;
}

/// Fits raw and (if present) subtracted scans with the configured model.
inline void fit(const ScenarioConfig& c, ScenarioData& d) {
    switch (c.fit_model) {
        case FitModel::none: return;
        case FitModel::dip:
            d.raw_fit = fit_gaussian_dip(d.raw);
            if (d.subtracted) d.subtracted_fit = fit_gaussian_dip(*d.subtracted);
            return;
        case FitModel::fringe:
            d.raw_fit = fit_two_phi_fringe(d.raw, c.calibration);
            if (d.subtracted) d.subtracted_fit = fit_two_phi_fringe(*d.subtracted, c.calibration);
            return;
        case FitModel::calibrate:
            d.calibration_fit = classical_fringe_calibrate(d.raw, c.calibration.resistance_ohm);
            d.raw_fit = d.calibration_fit->fit;
            return;
    }
}

/// Output directory: explicit override, then the config, then the
/// environment default, then the working directory.
inline std::filesystem::path resolve_out_dir(const ScenarioConfig& c,
                                             const std::optional<std::filesystem::path>& override_dir,
                                             const char* env_default) {
    if (override_dir) return *override_dir;
    if (c.out_dir) return *c.out_dir;
    if (env_default != nullptr && *env_default != '\0') return env_default;
    return ".";
}

namespace detail {

inline std::function<double(double)> fit_curve(const ScenarioConfig& c, const FitResult& fit) {
    std::optional<ThermoOpticCalibration> cal;
    if (c.kind == ScanKind::noon || c.kind == ScanKind::singles) cal = c.calibration;
    return io::curve_from_fit_json(io::to_json(fit), cal);
}

}  // namespace detail

/// Simulates, writes CSVs, fits, writes the fit report and plots.
/// Fit failures propagate after the CSVs are on disk.
inline ScenarioOutcome run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir) {
    ScenarioOutcome out;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    auto path = [&](const std::string& suffix) { return out_dir / (c.prefix + suffix); };

    out.data = simulate(c);
    ScenarioData& d = out.data;

    const bool background_only = c.kind == ScanKind::background;
    if (!background_only) {
        io::write_scan_csv(path("_raw.csv"), d.raw);
        out.files.push_back(path("_raw.csv"));
    }
    if (d.background_runs) {
        io::write_scan_csv(path("_background.csv"), *d.background_runs);
        out.files.push_back(path("_background.csv"));
    }
    if (d.subtracted) {
        io::write_scan_csv(path("_subtracted.csv"), *d.subtracted);
        out.files.push_back(path("_subtracted.csv"));
    }

    fit(c, d);

    io::json& r = out.report;
    r["scenario"] = c.name;
    r["kind"] = std::string(to_string(c.kind));
    r["seed"] = c.seed;
    r["expectation_mode"] = c.expectation_mode;
    if (c.kind == ScanKind::noon || c.kind == ScanKind::singles) r["calibration"] = io::to_json(c.calibration);
    if (!d.background.empty()) {
        if (d.background.size() == 1) {
            r["background"] = io::to_json(d.background.front());
        } else {
            io::json arr = io::json::array();
            for (const auto& b : d.background) arr.push_back(io::to_json(b));
            r["background"] = arr;
        }
    }
    io::json fits = io::json::object();
    if (d.raw_fit) fits["raw"] = io::to_json(*d.raw_fit);
    if (d.subtracted_fit) fits["subtracted"] = io::to_json(*d.subtracted_fit);
    r["fits"] = fits;
    if (d.calibration_fit) {
        r["fitted_calibration"] = io::to_json(d.calibration_fit->calibration);
        r["fitted_calibration"]["alpha_err_deg_per_mw"] = d.calibration_fit->alpha_err_deg_per_mw;
        r["fitted_calibration"]["phi0_err_rad"] = d.calibration_fit->phi0_err_rad;
        r["fitted_calibration"]["full_fringe_power_mw"] = full_fringe_power_mw(d.calibration_fit->calibration);
    }

    if (c.plot && !background_only) {
        const io::PlotLabels labels = io::default_labels(c.kind);
        auto plot_one = [&](const ScanResult& scan, const std::optional<FitResult>& fit_result, const std::string& suffix,
                            const std::string& title_suffix) {
            io::PlotLabels l = labels;
            l.title += title_suffix;
            const auto curve = fit_result ? detail::fit_curve(c, *fit_result) : std::function<double(double)>{};
            const io::PlotStatus status = io::emit_plot(scan, curve, l, path(suffix));
            out.files.push_back(path(suffix));
            for (const auto& w : status.warnings) out.warnings.push_back(path(suffix).string() + ": " + w);
        };
        plot_one(d.raw, d.raw_fit, "_raw.svg", " (raw)");
        if (d.subtracted) plot_one(*d.subtracted, d.subtracted_fit, "_subtracted.svg", " (background subtracted)");
    }

    io::json files = io::json::array();
    for (const auto& f : out.files) files.push_back(f.filename().string());
    files.push_back(path("_fit.json").filename().string());
    r["files"] = files;
    io::write_json(path("_fit.json"), r);
    out.files.push_back(path("_fit.json"));
    return out;
}

}  // namespace mzi::scenario

#endif  // MZI_SCENARIO_RUN_HPP
