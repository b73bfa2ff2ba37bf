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

#ifndef MZI_IO_REPORT_HPP
#define MZI_IO_REPORT_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mzi/circuit.hpp"
#include "mzi/errors.hpp"
#include "mzi/experiment.hpp"
#include "mzi/fitting.hpp"

namespace mzi::io {

using json = nlohmann::ordered_json;

inline json to_json(const FitResult& fit) {
    json j;
    j["model"] = fit.model;
    json params = json::object();
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        params[fit.names[i]] = {{"value", fit.params[k]}, {"error", fit.param_errs[k]}};
    }
    j["params"] = params;
    j["visibility"] = {{"value", fit.visibility}, {"error", fit.visibility_err}, {"flagged", fit.visibility_flagged}};
    json cov = json::array();
    for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) row.push_back(fit.covariance(r, c));
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["chi2"] = fit.chi2;
    j["dof"] = fit.dof;
    j["residual_norm"] = fit.residual_norm;
    j["iterations"] = fit.iterations;
    return j;
}

inline json to_json(const ThermoOpticCalibration& cal) {
    return {{"alpha_deg_per_mw", cal.alpha_deg_per_mw}, {"resistance_ohm", cal.resistance_ohm},
            {"phi0_rad", cal.phi0_rad}};
}

inline ThermoOpticCalibration calibration_from_json(const json& j) {
    ThermoOpticCalibration cal;
    cal.alpha_deg_per_mw = j.at("alpha_deg_per_mw").get<double>();
    cal.resistance_ohm = j.at("resistance_ohm").get<double>();
    cal.phi0_rad = j.at("phi0_rad").get<double>();
    cal.validate();
    return cal;
}

inline json to_json(const BackgroundEstimate& bg) { return {{"rate_per_s", bg.rate}, {"rate_err_per_s", bg.rate_err}}; }

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

/// Fitted curve as a function of the scan setting, rebuilt from a serialized
/// fit. `calibration` is required for fringe models on a voltage axis.
inline std::function<double(double)> curve_from_fit_json(const json& fit,
                                                         const std::optional<ThermoOpticCalibration>& calibration) {
    const std::string model = fit.at("model").get<std::string>();
    auto p = [&](const char* name) { return fit.at("params").at(name).at("value").get<double>(); };
    auto phase = [calibration](double x) { return calibration ? thermo_phase(x, *calibration) : x; };
    if (model == "gaussian_dip") {
        const double base = p("R_base"), v = p("V"), tau0 = p("tau0"), w = p("w");
        return [=](double x) {
            const double u = (x - tau0) / w;
            return base * (1.0 - v * std::exp(-0.5 * u * u));
        };
    }
    if (model == "two_phi_fringe") {
        const double r0 = p("R0"), a = p("A"), phi0 = p("phi0");
        return [=](double x) { return r0 * (1.0 + a * std::cos(2.0 * (phase(x) + phi0))); };
    }
    if (model == "free_frequency_fringe") {
        const double r0 = p("R0"), a = p("A"), f = p("f"), theta = p("theta");
        return [=](double x) { return r0 * (1.0 + a * std::cos(f * phase(x) + theta)); };
    }
    if (model == "classical_fringe") {
        if (!calibration) throw ValidationError("classical fringe curve needs the heater resistance");
        const double r0 = p("R0"), a = p("A"), f = p("f"), theta = p("theta");
        const double ohm = calibration->resistance_ohm;
        return [=](double x) { return r0 * (1.0 + a * std::cos(f * dissipated_power_mw(x, ohm) + theta)); };
    }
    throw ValidationError("unknown fit model '" + model + "'");
}

}  // namespace mzi::io

#endif  // MZI_IO_REPORT_HPP
