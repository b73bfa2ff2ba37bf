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

#ifndef MZI_CIRCUIT_HPP
#define MZI_CIRCUIT_HPP

#include <cmath>
#include <complex>
#include <iterator>
#include <map>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/fock.hpp"

namespace mzi {

/// Two-mode coupler. eta is the probability that a photon stays in its own
/// waveguide (beam-splitter reflectivity).
struct Coupler {
    int mode_a = 0;
    int mode_b = 1;
    double eta = 0.5;
};

/// Phase e^{i phase} applied to a single mode. Phase is stored unwrapped.
struct PhaseShifter {
    int mode = 0;
    double phase = 0.0;
};

using CircuitElement = std::variant<Coupler, PhaseShifter>;

/// Sign convention of the coupler's 2x2 block.
enum class SplitterConvention {
    /// [[sqrt(eta), i sqrt(1-eta)], [i sqrt(1-eta), sqrt(eta)]]
    symmetric,
    /// [[sqrt(eta), -sqrt(1-eta)], [sqrt(1-eta), sqrt(eta)]]
    real,
};

inline void validate(const Coupler& c, int mode_count) {
    if (c.mode_a < 0 || c.mode_b < 0 || c.mode_a >= mode_count || c.mode_b >= mode_count) {
        throw DimensionError("coupler mode index out of range for " + std::to_string(mode_count) + " modes");
    }
    if (c.mode_a == c.mode_b) {
        throw ValidationError("coupler must act on two distinct modes");
    }
    if (!(c.eta >= 0.0 && c.eta <= 1.0)) {
        throw ValidationError("coupler eta must lie in [0, 1]");
    }
}

inline void validate(const PhaseShifter& p, int mode_count) {
    if (p.mode < 0 || p.mode >= mode_count) {
        throw DimensionError("phase shifter mode index out of range for " + std::to_string(mode_count) +
                             " modes");
    }
    if (!std::isfinite(p.phase)) {
        throw ValidationError("phase must be finite");
    }
}

inline ComplexMatrix coupler_unitary(const Coupler& c, int mode_count,
                                     SplitterConvention convention = SplitterConvention::symmetric) {
    validate(c, mode_count);
    ComplexMatrix u = ComplexMatrix::Identity(mode_count, mode_count);
    const double t = std::sqrt(c.eta);
    const double r = std::sqrt(1.0 - c.eta);
    const int a = c.mode_a;
    const int b = c.mode_b;
    u(a, a) = t;
    u(b, b) = t;
    if (convention == SplitterConvention::symmetric) {
        u(a, b) = Complex{0.0, r};
        u(b, a) = Complex{0.0, r};
    } else {
        u(a, b) = -r;
        u(b, a) = r;
    }
    return u;
}

inline ComplexMatrix phase_unitary(const PhaseShifter& p, int mode_count) {
    validate(p, mode_count);
    ComplexMatrix u = ComplexMatrix::Identity(mode_count, mode_count);
    u(p.mode, p.mode) = std::polar(1.0, p.phase);
    return u;
}

/// Ordered list of couplers and phase shifters over a fixed number of modes.
class CircuitNetwork {
public:
    explicit CircuitNetwork(int mode_count = 2) : mode_count_(mode_count) {
        if (mode_count < 1) throw ValidationError("CircuitNetwork needs at least one mode");
    }

    CircuitNetwork& add(const Coupler& c) {
        validate(c, mode_count_);
        elements_.emplace_back(c);
        return *this;
    }

    CircuitNetwork& add(const PhaseShifter& p) {
        validate(p, mode_count_);
        elements_.emplace_back(p);
        return *this;
    }

    int mode_count() const noexcept { return mode_count_; }
    const std::vector<CircuitElement>& elements() const noexcept { return elements_; }

private:
    int mode_count_;
    std::vector<CircuitElement> elements_;
};

/// Product of element unitaries, first element acting first: U = E_k ... E_1.
inline ComplexMatrix compose(const CircuitNetwork& network,
                             SplitterConvention convention = SplitterConvention::symmetric) {
    const int m = network.mode_count();
    ComplexMatrix u = ComplexMatrix::Identity(m, m);
    for (const CircuitElement& e : network.elements()) {
        const ComplexMatrix step = std::visit(
            [&](const auto& el) -> ComplexMatrix {
                using T = std::decay_t<decltype(el)>;
                if constexpr (std::is_same_v<T, Coupler>) {
                    return coupler_unitary(el, m, convention);
                } else {
                    return phase_unitary(el, m);
                }
            },
            e);
        u = step * u;
    }
    return u;
}

/// Two-mode Mach-Zehnder interferometer: coupler, phase on mode 0, coupler.
inline CircuitNetwork mzi_network(double phase, double eta_in = 0.5, double eta_out = 0.5) {
    CircuitNetwork net(2);
    net.add(Coupler{0, 1, eta_in}).add(PhaseShifter{0, phase}).add(Coupler{0, 1, eta_out});
    return net;
}

/// A balanced MZI with internal phase difference delta_phi acts as a single
/// coupler with this reflectivity.
inline double mzi_effective_reflectivity(double delta_phi) { return 0.5 * (1.0 + std::cos(delta_phi)); }

/// Thermo-optic heater: phase = alpha * V^2 / R + phi0.
struct ThermoOpticCalibration {
    double alpha_deg_per_mw = 0.579;
    double resistance_ohm = 850.0;
    double phi0_rad = 0.0;

    void validate() const {
        if (!(alpha_deg_per_mw > 0.0) || !std::isfinite(alpha_deg_per_mw)) {
            throw ValidationError("alpha must be > 0 deg/mW");
        }
        if (!(resistance_ohm > 0.0) || !std::isfinite(resistance_ohm)) {
            throw ValidationError("heater resistance must be > 0 ohm");
        }
        if (!std::isfinite(phi0_rad)) throw ValidationError("phi0 must be finite");
    }

    double alpha_rad_per_mw() const { return alpha_deg_per_mw * std::numbers::pi / 180.0; }
};

/// Electrical power dissipated in the heater, mW.
inline double dissipated_power_mw(double voltage, double resistance_ohm) {
    return 1e3 * voltage * voltage / resistance_ohm;
}

inline double thermo_phase(double voltage, const ThermoOpticCalibration& cal) {
    cal.validate();
    if (voltage < 0.0) throw ValidationError("heater voltage must be >= 0");
    return cal.alpha_rad_per_mw() * dissipated_power_mw(voltage, cal.resistance_ohm) + cal.phi0_rad;
}

/// Heater power that advances the phase by a full 2 pi, mW.
inline double full_fringe_power_mw(const ThermoOpticCalibration& cal) {
    cal.validate();
    return 360.0 / cal.alpha_deg_per_mw;
}

/// Voltage producing a phase advance `delta_phase` (rad) over the zero-voltage phase.
inline double voltage_for_phase(double delta_phase, const ThermoOpticCalibration& cal) {
    cal.validate();
    if (delta_phase < 0.0) throw ValidationError("phase advance must be >= 0");
    const double power_mw = delta_phase / cal.alpha_rad_per_mw();
    return std::sqrt(power_mw * 1e-3 * cal.resistance_ohm);
}

/// X-coupler crossing angle (deg) to reflectivity lookup. Values between
/// anchors are linearly interpolated; outside the table is an error. The
/// default table holds the single measured anchor, 2.45 deg for 50:50.
class CouplerAngleTable {
public:
    CouplerAngleTable() : anchors_{{2.45, 0.5}} {}
    explicit CouplerAngleTable(std::map<double, double> anchors) : anchors_(std::move(anchors)) {
        if (anchors_.empty()) throw ValidationError("coupler angle table is empty");
        for (const auto& [angle, eta] : anchors_) {
            if (!(angle > 0.0) || !(eta >= 0.0 && eta <= 1.0)) {
                throw ValidationError("coupler angle table needs angle > 0 and eta in [0, 1]");
            }
        }
    }

    double eta_for_angle(double angle_deg) const {
        auto hi = anchors_.lower_bound(angle_deg);
        if (hi != anchors_.end() && hi->first == angle_deg) return hi->second;
        if (hi == anchors_.end() || hi == anchors_.begin()) {
            throw UnsupportedModelError("crossing angle " + std::to_string(angle_deg) +
                                        " deg is outside the calibration table");
        }
        auto lo = std::prev(hi);
        const double t = (angle_deg - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    const std::map<double, double>& anchors() const noexcept { return anchors_; }

private:
    std::map<double, double> anchors_;
};

}  // namespace mzi

#endif  // MZI_CIRCUIT_HPP
