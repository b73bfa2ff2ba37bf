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

#ifndef MZI_INTERFERENCE_HPP
#define MZI_INTERFERENCE_HPP

#include <algorithm>
#include <complex>
#include <span>
#include <vector>

#include "mzi/circuit.hpp"
#include "mzi/errors.hpp"
#include "mzi/fock.hpp"
#include "mzi/wavepacket.hpp"

namespace mzi {

/// One photon in each input mode: the |1,1> state.
struct TwoPhotonInput {
    PhotonWavepacket wavepacket_a;
    PhotonWavepacket wavepacket_b;

    static FockState input_state() { return FockState{1, 1}; }
    double overlap() const { return mode_overlap(wavepacket_a, wavepacket_b); }
};

struct InterferenceCurve {
    std::vector<double> settings;
    std::vector<double> probabilities;
};

/// Coupler reflectivities of a two-coupler MZI.
struct MziCouplers {
    double eta_in = 0.5;
    double eta_out = 0.5;
};

namespace detail {

inline void require_two_mode_unitary(const ComplexMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2) {
        throw DimensionError("two-photon coincidence needs the 2x2 block of the interfering modes");
    }
    if (!is_unitary(u)) throw ValidationError("mode transformation is not unitary within 1e-10");
}

}  // namespace detail

/// Probability of one photon at each output, for partially distinguishable
/// photons with overlap M:
///   P = M |perm U|^2 + (1 - M) (|u00 u11|^2 + |u01 u10|^2).
inline double coincidence_probability(const ComplexMatrix& u, double overlap) {
    detail::require_two_mode_unitary(u);
    if (!(overlap >= 0.0 && overlap <= 1.0)) throw ValidationError("mode overlap must lie in [0, 1]");
    const FockState one_one{1, 1};
    const double indistinguishable = std::norm(detail::transition_amplitude_unchecked(u, one_one, one_one));
    const double distinguishable = std::norm(u(0, 0)) * std::norm(u(1, 1)) + std::norm(u(0, 1)) * std::norm(u(1, 0));
    return std::clamp(overlap * indistinguishable + (1.0 - overlap) * distinguishable, 0.0, 1.0);
}

inline double coincidence_probability(const ComplexMatrix& u, const TwoPhotonInput& input) {
    return coincidence_probability(u, input.overlap());
}

/// Coincidence probability behind a single coupler as the relative delay is
/// scanned. Each setting tau is added to photon b's delay, so the dip sits at
/// tau = delay_a - delay_b.
inline InterferenceCurve hom_dip_curve(double eta, const TwoPhotonInput& input, std::span<const double> delays,
                                       SplitterConvention convention = SplitterConvention::symmetric) {
    const ComplexMatrix u = coupler_unitary(Coupler{0, 1, eta}, 2, convention);
    InterferenceCurve curve;
    curve.settings.assign(delays.begin(), delays.end());
    curve.probabilities.reserve(delays.size());
    for (double tau : delays) {
        PhotonWavepacket b = input.wavepacket_b;
        b.delay_fs += tau;
        curve.probabilities.push_back(coincidence_probability(u, mode_overlap(input.wavepacket_a, b)));
    }
    return curve;
}

/// Coincidence probability at the MZI output versus the internal phase.
inline InterferenceCurve noon_fringe_curve(const TwoPhotonInput& input, std::span<const double> phases,
                                           MziCouplers couplers = {},
                                           SplitterConvention convention = SplitterConvention::symmetric) {
    const double m = input.overlap();
    InterferenceCurve curve;
    curve.settings.assign(phases.begin(), phases.end());
    curve.probabilities.reserve(phases.size());
    for (double phi : phases) {
        const ComplexMatrix u = compose(mzi_network(phi, couplers.eta_in, couplers.eta_out), convention);
        curve.probabilities.push_back(coincidence_probability(u, m));
    }
    return curve;
}

/// Single-photon probability of reaching `detect_mode` from `input_mode`
/// through the MZI: the classical fringe, period 2 pi in phase.
inline InterferenceCurve singles_fringe_curve(int input_mode, std::span<const double> phases, int detect_mode,
                                              MziCouplers couplers = {},
                                              SplitterConvention convention = SplitterConvention::symmetric) {
    if (input_mode < 0 || input_mode > 1 || detect_mode < 0 || detect_mode > 1) {
        throw DimensionError("MZI has modes 0 and 1");
    }
    std::vector<int> in_occ{0, 0};
    std::vector<int> out_occ{0, 0};
    in_occ[static_cast<std::size_t>(input_mode)] = 1;
    out_occ[static_cast<std::size_t>(detect_mode)] = 1;
    const FockState in{in_occ};
    const FockState out{out_occ};
    InterferenceCurve curve;
    curve.settings.assign(phases.begin(), phases.end());
    curve.probabilities.reserve(phases.size());
    for (double phi : phases) {
        const ComplexMatrix u = compose(mzi_network(phi, couplers.eta_in, couplers.eta_out), convention);
        curve.probabilities.push_back(std::clamp(std::norm(transition_amplitude(u, in, out)), 0.0, 1.0));
    }
    return curve;
}

/// Closed forms for the balanced devices, used as cross-checks.
inline double balanced_hom_visibility(double overlap) { return overlap; }
inline double balanced_noon_visibility(double overlap) { return (1.0 + overlap) / (3.0 - overlap); }

/// Inverse of balanced_noon_visibility.
inline double overlap_for_noon_visibility(double visibility) {
    return (3.0 * visibility - 1.0) / (1.0 + visibility);
}

}  // namespace mzi

#endif  // MZI_INTERFERENCE_HPP
