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

#ifndef MZI_SCENARIO_CONFIG_HPP
#define MZI_SCENARIO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "mzi/circuit.hpp"
#include "mzi/errors.hpp"
#include "mzi/experiment.hpp"
#include "mzi/interference.hpp"
#include "mzi/wavepacket.hpp"

namespace mzi::scenario {

enum class FitModel { none, dip, fringe, calibrate };

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            v.push_back(points == 1 ? start : start + (stop - start) * i / (points - 1));
        }
        return v;
    }
};

/// Everything needed to run one scan, fit it, and write the artifacts.
struct ScenarioConfig {
    ScanKind kind = ScanKind::hom;
    std::string name = "scenario";
    std::uint64_t seed = 1;
    bool expectation_mode = false;

    double eta = 0.5;  ///< hom: single-coupler reflectivity
    MziCouplers couplers;
    int input_mode = 0;
    int detect_mode = 1;
    ThermoOpticCalibration calibration;

    PhotonWavepacket photon_a;
    PhotonWavepacket photon_b;

    GridSpec grid;
    double integration_time_s = 1.0;

    double pair_rate = 0.0;
    double background_rate = 0.0;
    std::vector<double> background_table;

    bool measure_background = true;
    double background_time_per_side_s = 300.0;

    FitModel fit_model = FitModel::none;

    std::optional<std::filesystem::path> out_dir;
    std::string prefix;
    bool plot = true;

    SourceSpec source() const { return {pair_rate, background_rate, seed}; }
    TwoPhotonInput input() const { return {photon_a, photon_b}; }
};

namespace detail {

inline ConfigError error_at(const YAML::Node& node, const std::string& what) {
    const YAML::Mark m = node.Mark();
    return ConfigError(what, m.line, m.column);
}

/// Mapping node with a fixed key set; unknown keys are errors.
class Section {
public:
    Section(const YAML::Node& node, std::string name, std::set<std::string> allowed)
        : node_(node), name_(std::move(name)) {
        if (!node_.IsMap()) throw error_at(node_, "'" + name_ + "' must be a mapping");
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                throw error_at(kv.first, "unknown key '" + key + "' in " + name_);
            }
        }
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
    YAML::Node node(const std::string& key) const { return node_[key]; }
    YAML::Node self() const { return node_; }

    template <class T>
    T get(const std::string& key, const T& fallback) const {
        const YAML::Node v = node_[key];
        if (!v) return fallback;
        return convert<T>(v, key);
    }

    template <class T>
    T require(const std::string& key) const {
        const YAML::Node v = node_[key];
        if (!v) throw error_at(node_, "missing required key '" + key + "' in " + name_);
        return convert<T>(v, key);
    }

    template <class T>
    T convert(const YAML::Node& v, const std::string& key) const {
        if (!v.IsScalar()) throw error_at(v, "'" + name_ + "." + key + "' must be a scalar");
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            throw error_at(v, "'" + name_ + "." + key + "' has the wrong type");
        }
    }

private:
    YAML::Node node_;
    std::string name_;
};

inline void check_range(bool ok, const YAML::Node& node, const std::string& what) {
    if (!ok) throw error_at(node, what);
}

}  // namespace detail

/// Parses and validates a scenario. Errors carry the YAML position.
inline ScenarioConfig parse_config(const YAML::Node& root) {
    using detail::Section;
    using detail::check_range;
    using detail::error_at;
    const Section top(root, "config",
                      {"kind", "name", "seed", "expectation_mode", "circuit", "calibration", "photons", "scan",
                       "source", "background", "fit", "output"});
    ScenarioConfig c;
    const auto kind_text = top.require<std::string>("kind");
    const auto kind = scan_kind_from_string(kind_text);
    if (!kind) throw error_at(top.node("kind"), "kind must be one of hom, noon, singles, background");
    c.kind = *kind;
    c.name = top.get<std::string>("name", c.name);
    c.seed = top.get<std::uint64_t>("seed", c.seed);
    c.expectation_mode = top.get<bool>("expectation_mode", c.expectation_mode);

    if (top.has("circuit")) {
        const Section s(top.node("circuit"), "circuit",
                        {"eta", "mzi_delta_phi_rad", "crossing_angle_deg", "coupler_table", "eta_in", "eta_out",
                         "input_mode", "detect_mode"});
        const int given = static_cast<int>(s.has("eta")) + static_cast<int>(s.has("mzi_delta_phi_rad")) +
                          static_cast<int>(s.has("crossing_angle_deg"));
        if (given > 1) throw error_at(s.self(), "give only one of eta, mzi_delta_phi_rad, crossing_angle_deg");
        if (s.has("eta")) c.eta = s.get<double>("eta", c.eta);
        if (s.has("mzi_delta_phi_rad")) c.eta = mzi_effective_reflectivity(s.get<double>("mzi_delta_phi_rad", 0.0));
        if (s.has("crossing_angle_deg")) {
            CouplerAngleTable table;
            if (s.has("coupler_table")) {
                const YAML::Node t = s.node("coupler_table");
                if (!t.IsMap()) throw error_at(t, "coupler_table must map angle (deg) to eta");
                std::map<double, double> anchors;
                for (const auto& kv : t) {
                    try {
                        anchors[kv.first.as<double>()] = kv.second.as<double>();
                    } catch (const YAML::Exception&) {
                        throw error_at(kv.first, "coupler_table entries must be numbers");
                    }
                }
                try {
                    table = CouplerAngleTable(anchors);
                } catch (const ValidationError& e) {
                    throw error_at(t, e.what());
                }
            }
            try {
                c.eta = table.eta_for_angle(s.get<double>("crossing_angle_deg", 0.0));
            } catch (const Error& e) {
                throw error_at(s.node("crossing_angle_deg"), e.what());
            }
        } else if (s.has("coupler_table")) {
            throw error_at(s.node("coupler_table"), "coupler_table is only used with crossing_angle_deg");
        }
        check_range(c.eta >= 0.0 && c.eta <= 1.0, s.self(), "circuit eta must lie in [0, 1]");
        c.couplers.eta_in = s.get<double>("eta_in", c.couplers.eta_in);
        c.couplers.eta_out = s.get<double>("eta_out", c.couplers.eta_out);
        check_range(c.couplers.eta_in >= 0.0 && c.couplers.eta_in <= 1.0 && c.couplers.eta_out >= 0.0 &&
                        c.couplers.eta_out <= 1.0,
                    s.self(), "eta_in and eta_out must lie in [0, 1]");
        c.input_mode = s.get<int>("input_mode", c.input_mode);
        c.detect_mode = s.get<int>("detect_mode", c.detect_mode);
        check_range(c.input_mode >= 0 && c.input_mode <= 1 && c.detect_mode >= 0 && c.detect_mode <= 1, s.self(),
                    "input_mode and detect_mode must be 0 or 1");
    }

    if (top.has("calibration")) {
        const Section s(top.node("calibration"), "calibration", {"alpha_deg_per_mw", "resistance_ohm", "phi0_rad"});
        c.calibration.alpha_deg_per_mw = s.get<double>("alpha_deg_per_mw", c.calibration.alpha_deg_per_mw);
        c.calibration.resistance_ohm = s.get<double>("resistance_ohm", c.calibration.resistance_ohm);
        c.calibration.phi0_rad = s.get<double>("phi0_rad", c.calibration.phi0_rad);
        try {
            c.calibration.validate();
        } catch (const ValidationError& e) {
            throw error_at(s.self(), e.what());
        }
    }

    if (top.has("photons")) {
        const Section s(top.node("photons"), "photons",
                        {"center_wavelength_nm", "bandwidth_fwhm_nm", "delay_a_fs", "delay_b_fs",
                         "polarization_overlap_a", "polarization_overlap_b"});
        for (PhotonWavepacket* p : {&c.photon_a, &c.photon_b}) {
            p->center_wavelength_nm = s.get<double>("center_wavelength_nm", p->center_wavelength_nm);
            p->bandwidth_fwhm_nm = s.get<double>("bandwidth_fwhm_nm", p->bandwidth_fwhm_nm);
        }
        c.photon_a.delay_fs = s.get<double>("delay_a_fs", 0.0);
        c.photon_b.delay_fs = s.get<double>("delay_b_fs", 0.0);
        c.photon_a.polarization_overlap = s.get<double>("polarization_overlap_a", 1.0);
        c.photon_b.polarization_overlap = s.get<double>("polarization_overlap_b", 1.0);
        try {
            c.photon_a.validate();
            c.photon_b.validate();
        } catch (const ValidationError& e) {
            throw error_at(s.self(), e.what());
        }
    }

    if (c.kind != ScanKind::background) {
        if (!top.has("scan")) throw error_at(root, "missing required section 'scan'");
        const Section s(top.node("scan"), "scan", {"start", "stop", "points", "integration_time_s"});
        c.grid.start = s.require<double>("start");
        c.grid.stop = s.require<double>("stop");
        c.grid.points = s.require<int>("points");
        c.integration_time_s = s.get<double>("integration_time_s", c.integration_time_s);
        check_range(c.grid.points >= 1, s.node("points"), "scan.points must be >= 1");
        check_range(c.grid.points == 1 || c.grid.stop != c.grid.start, s.self(),
                    "scan grid must be strictly monotone (start != stop)");
        check_range(c.integration_time_s > 0.0, s.self(), "scan.integration_time_s must be > 0");
        if (c.kind == ScanKind::noon || c.kind == ScanKind::singles) {
            check_range(c.grid.start >= 0.0 && c.grid.stop >= 0.0, s.self(), "heater voltages must be >= 0");
        }
    }

    if (top.has("source")) {
        const Section s(top.node("source"), "source", {"pair_rate", "background_rate", "background_table"});
        c.pair_rate = s.get<double>("pair_rate", c.pair_rate);
        c.background_rate = s.get<double>("background_rate", c.background_rate);
        check_range(c.pair_rate >= 0.0 && c.background_rate >= 0.0, s.self(), "source rates must be >= 0");
        if (s.has("background_table")) {
            const YAML::Node t = s.node("background_table");
            if (!t.IsSequence()) throw error_at(t, "background_table must be a list of rates");
            for (const auto& v : t) {
                double b = 0.0;
                try {
                    b = v.as<double>();
                } catch (const YAML::Exception&) {
                    throw error_at(v, "background_table entries must be numbers");
                }
                check_range(b >= 0.0, v, "background_table entries must be >= 0");
                c.background_table.push_back(b);
            }
            check_range(c.kind == ScanKind::noon, t, "background_table is only supported for noon scans");
            check_range(static_cast<int>(c.background_table.size()) == c.grid.points, t,
                        "background_table needs one entry per scan point");
        }
    }

    if (top.has("background")) {
        const Section s(top.node("background"), "background", {"measure", "time_per_side_s"});
        c.measure_background = s.get<bool>("measure", c.measure_background);
        c.background_time_per_side_s = s.get<double>("time_per_side_s", c.background_time_per_side_s);
        check_range(c.background_time_per_side_s > 0.0, s.self(), "background.time_per_side_s must be > 0");
    }

    switch (c.kind) {
        case ScanKind::hom: c.fit_model = FitModel::dip; break;
        case ScanKind::noon: c.fit_model = FitModel::fringe; break;
        case ScanKind::singles: c.fit_model = FitModel::calibrate; break;
        case ScanKind::background: c.fit_model = FitModel::none; break;
    }
    if (top.has("fit")) {
        const Section s(top.node("fit"), "fit", {"model"});
        const auto m = s.get<std::string>("model", "");
        if (m == "none") {
            c.fit_model = FitModel::none;
        } else if (m == "dip") {
            c.fit_model = FitModel::dip;
        } else if (m == "fringe") {
            c.fit_model = FitModel::fringe;
        } else if (m == "calibrate") {
            c.fit_model = FitModel::calibrate;
        } else if (!m.empty()) {
            throw error_at(s.node("model"), "fit.model must be one of none, dip, fringe, calibrate");
        }
        const bool compatible = c.fit_model == FitModel::none ||
                                (c.kind == ScanKind::hom && c.fit_model == FitModel::dip) ||
                                (c.kind == ScanKind::noon && c.fit_model == FitModel::fringe) ||
                                (c.kind == ScanKind::singles && c.fit_model == FitModel::calibrate);
        check_range(compatible, s.self(), "fit.model does not match the scan kind");
    }

    if (top.has("output")) {
        const Section s(top.node("output"), "output", {"dir", "prefix", "plot"});
        if (s.has("dir")) c.out_dir = s.get<std::string>("dir", "");
        c.prefix = s.get<std::string>("prefix", c.prefix);
        c.plot = s.get<bool>("plot", c.plot);
    }
    if (c.prefix.empty()) c.prefix = c.name;
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    try {
        return parse_config(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line, e.mark.column);
    }
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw IoError("cannot read config " + path.string());
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path.string() + ": " + e.msg, e.mark.line, e.mark.column);
    }
    return parse_config(root);
}

}  // namespace mzi::scenario

#endif  // MZI_SCENARIO_CONFIG_HPP
