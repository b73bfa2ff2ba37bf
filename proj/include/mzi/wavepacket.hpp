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

#ifndef MZI_WAVEPACKET_HPP
#define MZI_WAVEPACKET_HPP

#include <cmath>
#include <numbers>

#include "mzi/errors.hpp"

namespace mzi {

/// Speed of light in nm/fs.
inline constexpr double kSpeedOfLightNmPerFs = 299.792458;

/// Single-photon descriptor. The spectrum is a Gaussian in intensity with the
/// given center and FWHM; polarization mismatch enters as a scalar overlap.
struct PhotonWavepacket {
    double center_wavelength_nm = 830.0;
    double bandwidth_fwhm_nm = 3.0;
    double delay_fs = 0.0;
    double polarization_overlap = 1.0;

    void validate() const {
        if (!(center_wavelength_nm > 0.0) || !std::isfinite(center_wavelength_nm)) {
            throw ValidationError("center_wavelength_nm must be > 0");
        }
        if (!(bandwidth_fwhm_nm > 0.0) || !std::isfinite(bandwidth_fwhm_nm)) {
            throw ValidationError("bandwidth_fwhm_nm must be > 0");
        }
        if (!std::isfinite(delay_fs)) {
            throw ValidationError("delay_fs must be finite");
        }
        if (!(polarization_overlap >= 0.0 && polarization_overlap <= 1.0)) {
            throw ValidationError("polarization_overlap must lie in [0, 1]");
        }
    }

    /// Standard deviation of the spectral intensity in angular frequency (rad/fs).
    double sigma_omega() const {
        const double fwhm_hz = kSpeedOfLightNmPerFs * bandwidth_fwhm_nm /
                               (center_wavelength_nm * center_wavelength_nm);
        const double fwhm_omega = 2.0 * std::numbers::pi * fwhm_hz;
        return fwhm_omega / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    }

    /// Delay at which the spectral overlap drops to 1/e (fs).
    double coherence_time_fs() const { return 1.0 / sigma_omega(); }
};

/// Two-photon mode overlap M in [0,1]:
///   M = p_a p_b exp(-sigma_omega^2 (delay_a - delay_b)^2)
/// which is |int S(w) e^{i w tau} dw|^2 for the normalized Gaussian spectral
/// intensity S, times the polarization factor. Only identical spectra are modeled.
inline double mode_overlap(const PhotonWavepacket& a, const PhotonWavepacket& b) {
    a.validate();
    b.validate();
    if (a.center_wavelength_nm != b.center_wavelength_nm || a.bandwidth_fwhm_nm != b.bandwidth_fwhm_nm) {
        throw UnsupportedModelError("mode_overlap only supports photons with identical spectra");
    }
    const double tau = a.delay_fs - b.delay_fs;
    const double s = a.sigma_omega();
    return a.polarization_overlap * b.polarization_overlap * std::exp(-s * s * tau * tau);
}

}  // namespace mzi

#endif  // MZI_WAVEPACKET_HPP
