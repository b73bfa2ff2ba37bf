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

#ifndef MZI_EXPERIMENT_HPP
#define MZI_EXPERIMENT_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mzi/circuit.hpp"
#include "mzi/errors.hpp"
#include "mzi/interference.hpp"

namespace mzi {

/// Photon-pair source as seen at the interferometer input. All coupling and
/// detection losses are folded into pair_rate; multi-pair emission shows up
/// as a constant accidental-coincidence rate.
struct SourceSpec {
    double pair_rate = 0.0;        ///< counts/s
    double background_rate = 0.0;  ///< counts/s
    std::uint64_t seed = 0;

    void validate() const {
        if (!(pair_rate >= 0.0) || !std::isfinite(pair_rate)) throw ValidationError("pair_rate must be >= 0");
        if (!(background_rate >= 0.0) || !std::isfinite(background_rate)) {
            throw ValidationError("background_rate must be >= 0");
        }
    }
};

/// One detector integration. For raw records rate = counts / t and
/// rate_err = sqrt(counts) / t. Background-subtracted records keep the raw
/// counts and carry the subtracted estimate in bg_rate / bg_rate_err.
/// In expectation mode counts holds the (non-integer) Poisson mean.
struct CountRecord {
    double setting = 0.0;
    double counts = 0.0;
    double integration_time = 1.0;
    double rate = 0.0;
    double rate_err = 0.0;
    double bg_rate = 0.0;
    double bg_rate_err = 0.0;

    friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

enum class ScanKind { hom, noon, singles, background };

inline std::string_view to_string(ScanKind k) {
    switch (k) {
        case ScanKind::hom: return "hom";
        case ScanKind::noon: return "noon";
        case ScanKind::singles: return "singles";
        case ScanKind::background: return "background";
    }
    return "unknown";
}

inline std::optional<ScanKind> scan_kind_from_string(std::string_view s) {
    if (s == "hom") return ScanKind::hom;
    if (s == "noon") return ScanKind::noon;
    if (s == "singles") return ScanKind::singles;
    if (s == "background") return ScanKind::background;
    return std::nullopt;
}

struct ScanResult {
    ScanKind kind = ScanKind::hom;
    std::vector<CountRecord> records;
    bool background_subtracted = false;

    std::vector<double> settings() const {
        std::vector<double> s;
        s.reserve(records.size());
        for (const auto& r : records) s.push_back(r.setting);
        return s;
    }

    friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

/// Background estimate with its one-sigma uncertainty, counts/s.
struct BackgroundEstimate {
    double rate = 0.0;
    double rate_err = 0.0;
};

/// Deterministic random stream. Each scan owns one; `stream` separates
/// independent uses of the same seed (scan vs background runs).
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    return Rng(seq);
}

enum class StreamId : std::uint32_t { scan = 0, background = 1 };

/// Poisson counts with mean (signal_rate * prob + background_rate) * time.
/// With rng == nullptr the mean itself is returned (expectation mode).
inline CountRecord simulate_counts(double prob, double signal_rate, double background_rate, double time,
                                   Rng* rng) {
    if (!(time > 0.0)) throw ValidationError("integration time must be > 0");
    if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("probability must lie in [0, 1]");
    const double mean = (prob * signal_rate + background_rate) * time;
    double counts = mean;
    if (rng != nullptr) {
        counts = mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(*rng)) : 0.0;
    }
    CountRecord rec;
    rec.counts = counts;
    rec.integration_time = time;
    rec.rate = counts / time;
    rec.rate_err = std::sqrt(counts) / time;
    return rec;
}

inline CountRecord simulate_counts(double prob, const SourceSpec& source, double time, Rng& rng) {
    source.validate();
    return simulate_counts(prob, source.pair_rate, source.background_rate, time, &rng);
}

namespace detail {

inline void require_monotone_grid(std::span<const double> grid, std::string_view what) {
    if (grid.empty()) throw ValidationError(std::string(what) + " grid is empty");
    const bool increasing = grid.size() < 2 || grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (increasing ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
            throw ValidationError(std::string(what) + " grid must be strictly monotone");
        }
    }
}

inline ScanResult count_curve(ScanKind kind, const InterferenceCurve& curve, const SourceSpec& source,
                              double integration_time, bool expectation_mode,
                              std::span<const double> background_table = {}) {
    source.validate();
    if (!background_table.empty() && background_table.size() != curve.settings.size()) {
        throw ValidationError("background table must have one entry per scan setting");
    }
    Rng rng = make_rng(source.seed, static_cast<std::uint32_t>(StreamId::scan));
    ScanResult result;
    result.kind = kind;
    result.records.reserve(curve.settings.size());
    for (std::size_t i = 0; i < curve.settings.size(); ++i) {
        const double bg = background_table.empty() ? source.background_rate : background_table[i];
        CountRecord rec = simulate_counts(curve.probabilities[i], source.pair_rate, bg, integration_time,
                                          expectation_mode ? nullptr : &rng);
        rec.setting = curve.settings[i];
        result.records.push_back(rec);
    }
    return result;
}

}  // namespace detail

struct HomScanConfig {
    double eta = 0.5;
    TwoPhotonInput input;
    std::vector<double> delays_fs;
    double integration_time_s = 1.0;
    SourceSpec source;
    bool expectation_mode = false;
};

/// Delay scan behind a single coupler (or an MZI set to reflectivity eta).
inline ScanResult run_hom_scan(const HomScanConfig& config) {
    detail::require_monotone_grid(config.delays_fs, "delay");
    const InterferenceCurve curve = hom_dip_curve(config.eta, config.input, config.delays_fs);
    return detail::count_curve(ScanKind::hom, curve, config.source, config.integration_time_s,
                               config.expectation_mode);
}

struct NoonScanConfig {
    std::vector<double> voltages;
    ThermoOpticCalibration calibration;
    TwoPhotonInput input;
    MziCouplers couplers;
    double integration_time_s = 1.0;
    SourceSpec source;
    /// Optional per-voltage accidental rate; empty means source.background_rate everywhere.
    std::vector<double> background_table;
    bool expectation_mode = false;
};

inline std::vector<double> heater_phases(std::span<const double> voltages, const ThermoOpticCalibration& cal) {
    std::vector<double> phases;
    phases.reserve(voltages.size());
    for (double v : voltages) phases.push_back(thermo_phase(v, cal));
    return phases;
}

/// Two-photon coincidence scan over heater voltage. Settings are volts.
inline ScanResult run_noon_scan(const NoonScanConfig& config) {
    detail::require_monotone_grid(config.voltages, "voltage");
    const std::vector<double> phases = heater_phases(config.voltages, config.calibration);
    InterferenceCurve curve = noon_fringe_curve(config.input, phases, config.couplers);
    curve.settings = config.voltages;
    return detail::count_curve(ScanKind::noon, curve, config.source, config.integration_time_s,
                               config.expectation_mode, config.background_table);
}

struct SinglesScanConfig {
    std::vector<double> voltages;
    ThermoOpticCalibration calibration;
    int input_mode = 0;
    int detect_mode = 1;
    MziCouplers couplers;
    double integration_time_s = 1.0;
    /// pair_rate is the single-photon rate into input_mode here.
    SourceSpec source;
    bool expectation_mode = false;
};

/// Classical single-photon fringe over heater voltage. Settings are volts.
inline ScanResult run_singles_scan(const SinglesScanConfig& config) {
    detail::require_monotone_grid(config.voltages, "voltage");
    const std::vector<double> phases = heater_phases(config.voltages, config.calibration);
    InterferenceCurve curve = singles_fringe_curve(config.input_mode, phases, config.detect_mode, config.couplers);
    curve.settings = config.voltages;
    return detail::count_curve(ScanKind::singles, curve, config.source, config.integration_time_s,
                               config.expectation_mode);
}

struct BackgroundConfig {
    SourceSpec source;
    double time_per_side_s = 300.0;
    bool expectation_mode = false;
};

/// The two blocked-input runs. With one input blocked only multi-pair
/// emission on the open arm produces coincidences; each arm contributes half
/// of the accidental rate. Record setting = index of the blocked input.
inline ScanResult measure_background_runs(const BackgroundConfig& config, double background_rate) {
    if (!(config.time_per_side_s > 0.0)) throw ValidationError("background counting time must be > 0");
    if (!(background_rate >= 0.0)) throw ValidationError("background rate must be >= 0");
    Rng rng = make_rng(config.source.seed, static_cast<std::uint32_t>(StreamId::background));
    ScanResult runs;
    runs.kind = ScanKind::background;
    for (int blocked = 0; blocked < 2; ++blocked) {
        CountRecord rec = simulate_counts(0.0, 0.0, 0.5 * background_rate, config.time_per_side_s,
                                          config.expectation_mode ? nullptr : &rng);
        rec.setting = blocked;
        runs.records.push_back(rec);
    }
    return runs;
}

inline ScanResult measure_background_runs(const BackgroundConfig& config) {
    config.source.validate();
    return measure_background_runs(config, config.source.background_rate);
}

/// Sum of blocked-input counts normalized by the counting time of one run.
inline BackgroundEstimate background_from_runs(const ScanResult& runs) {
    if (runs.records.empty()) throw ValidationError("no background runs");
    const double time = runs.records.front().integration_time;
    double total = 0.0;
    for (const auto& r : runs.records) {
        if (r.integration_time != time) throw ValidationError("background runs must share one counting time");
        total += r.counts;
    }
    return {total / time, std::sqrt(total) / time};
}

inline BackgroundEstimate measure_background(const BackgroundConfig& config) {
    return background_from_runs(measure_background_runs(config));
}

/// Per-setting background estimates for a phase-dependent accidental rate.
/// Each setting gets its own pair of blocked runs from one shared stream.
inline std::vector<BackgroundEstimate> measure_background_profile(const BackgroundConfig& config,
                                                                  std::span<const double> background_table) {
    if (!(config.time_per_side_s > 0.0)) throw ValidationError("background counting time must be > 0");
    Rng rng = make_rng(config.source.seed, static_cast<std::uint32_t>(StreamId::background));
    std::vector<BackgroundEstimate> out;
    out.reserve(background_table.size());
    for (double b : background_table) {
        if (!(b >= 0.0)) throw ValidationError("background rate must be >= 0");
        double total = 0.0;
        for (int side = 0; side < 2; ++side) {
            total += simulate_counts(0.0, 0.0, 0.5 * b, config.time_per_side_s,
                                     config.expectation_mode ? nullptr : &rng)
                         .counts;
        }
        out.push_back({total / config.time_per_side_s, std::sqrt(total) / config.time_per_side_s});
    }
    return out;
}

/// rate' = rate - bg, errors in quadrature. Negative rates are kept.
inline ScanResult subtract_background(const ScanResult& raw, std::span<const BackgroundEstimate> bg) {
    if (raw.background_subtracted) throw ValidationError("scan is already background subtracted");
    if (bg.size() != 1 && bg.size() != raw.records.size()) {
        throw ValidationError("need one background estimate or one per record");
    }
    ScanResult out = raw;
    out.background_subtracted = true;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        const BackgroundEstimate& b = bg.size() == 1 ? bg[0] : bg[i];
        CountRecord& r = out.records[i];
        r.rate -= b.rate;
        r.rate_err = std::hypot(r.rate_err, b.rate_err);
        r.bg_rate = b.rate;
        r.bg_rate_err = b.rate_err;
    }
    return out;
}

inline ScanResult subtract_background(const ScanResult& raw, const BackgroundEstimate& bg) {
    return subtract_background(raw, std::span<const BackgroundEstimate>(&bg, 1));
}

}  // namespace mzi

#endif  // MZI_EXPERIMENT_HPP
