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

#ifndef MZI_SELFTEST_HPP
#define MZI_SELFTEST_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mzi/circuit.hpp"
#include "mzi/fock.hpp"
#include "mzi/interference.hpp"
#include "mzi/verify/fock_oracle.hpp"

namespace mzi {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int cases = 0;
};

struct SelftestReport {
    std::vector<SuiteResult> suites;
    bool all_passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
    }
};

/// Constants the suites rely on, exposed so tests can perturb them and check
/// that the right suite notices.
struct SelftestHooks {
    double balanced_eta = 0.5;
    double hom_cancellation_eta = 0.5;
};

namespace selftest {

inline SuiteResult finish(std::string name, double max_dev, double tol, int cases) {
    return {std::move(name), max_dev < tol, max_dev, tol, cases};
}

/// Random networks of up to 6 elements over up to 4 modes compile to unitaries.
inline SuiteResult unitarity(std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> modes_dist(2, 4);
    std::uniform_int_distribution<int> len_dist(0, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = modes_dist(rng);
        CircuitNetwork net(m);
        const int len = len_dist(rng);
        for (int k = 0; k < len; ++k) {
            std::uniform_int_distribution<int> mode(0, m - 1);
            if (unit(rng) < 0.5) {
                const int a = mode(rng);
                int b = mode(rng);
                while (b == a) b = mode(rng);
                net.add(Coupler{a, b, unit(rng)});
            } else {
                net.add(PhaseShifter{mode(rng), 4.0 * std::numbers::pi * (unit(rng) - 0.5)});
            }
        }
        worst = std::max(worst, unitarity_defect(compose(net)));
    }
    return finish("unitarity", worst, 1e-10, 100);
}

/// Permanent amplitudes against explicit creation-operator expansion.
inline SuiteResult oracle_equivalence(std::uint64_t seed = 2) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int cases = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        const ComplexMatrix u = verify::random_unitary(m, rng);
        for (int n = 1; n <= 3; ++n) {
            const auto basis = fock_sector(m, n);
            for (const auto& in : basis) {
                for (const auto& out : basis) {
                    const Complex a = transition_amplitude(u, in, out);
                    const Complex b = verify::oracle_amplitude(u, in, out);
                    worst = std::max(worst, std::abs(a - b));
                    ++cases;
                }
            }
        }
    }
    return finish("oracle_equivalence", worst, 1e-10, cases);
}

/// V_dip = M and A = (1+M)/(3-M) on the balanced devices, with the simulated
/// curves also matched point-by-point against brute-force evolution.
inline SuiteResult visibility_laws(const SelftestHooks& hooks = {}) {
    const double overlaps[] = {0.0, 0.5, 0.872, 0.95, 1.0};
    double worst = 0.0;
    int cases = 0;
    const FockState one_one{1, 1};
    for (double m : overlaps) {
        // HOM dip: M enters through the polarization factor at zero delay.
        TwoPhotonInput input;
        input.wavepacket_b.polarization_overlap = m;
        const double far = 50.0 * input.wavepacket_a.coherence_time_fs();
        const double delays[] = {0.0, far};
        const InterferenceCurve dip = hom_dip_curve(hooks.balanced_eta, input, delays);
        const ComplexMatrix bs = coupler_unitary(Coupler{0, 1, 0.5}, 2);
        const double brute_min = m * std::norm(verify::oracle_amplitude(bs, one_one, one_one)) +
                                 (1.0 - m) * verify::distinguishable_coincidence(bs);
        const double brute_base = verify::distinguishable_coincidence(bs);
        const double v_dip = (dip.probabilities[1] - dip.probabilities[0]) / dip.probabilities[1];
        worst = std::max({worst, std::abs(v_dip - m), std::abs(dip.probabilities[0] - brute_min),
                          std::abs(dip.probabilities[1] - brute_base)});
        ++cases;

        // N00N fringe, extremes sit on the pi/8 grid.
        std::vector<double> phases;
        for (int k = 0; k <= 16; ++k) phases.push_back(k * std::numbers::pi / 8.0);
        const InterferenceCurve fringe = noon_fringe_curve(input, phases, {hooks.balanced_eta, hooks.balanced_eta});
        for (std::size_t k = 0; k < phases.size(); ++k) {
            const ComplexMatrix u = compose(mzi_network(phases[k]));
            const double brute = m * std::norm(verify::oracle_amplitude(u, one_one, one_one)) +
                                 (1.0 - m) * verify::distinguishable_coincidence(u);
            worst = std::max(worst, std::abs(fringe.probabilities[k] - brute));
        }
        const auto [lo, hi] = std::minmax_element(fringe.probabilities.begin(), fringe.probabilities.end());
        const double a = (*hi - *lo) / (*hi + *lo);
        worst = std::max(worst, std::abs(a - balanced_noon_visibility(m)));
        ++cases;
    }
    return finish("visibility_laws", worst, 1e-10, cases);
}

/// Indistinguishable photons on a balanced coupler never give a coincidence.
inline SuiteResult hom_cancellation(const SelftestHooks& hooks = {}) {
    const ComplexMatrix u = coupler_unitary(Coupler{0, 1, hooks.hom_cancellation_eta}, 2);
    return finish("hom_cancellation", coincidence_probability(u, TwoPhotonInput{}), 1e-12, 1);
}

/// Compiled MZI single-photon outputs equal {(1+cos), (1-cos)}/2.
inline SuiteResult mzi_reflectivity() {
    double worst = 0.0;
    const FockState in{1, 0};
    for (int k = 0; k < 100; ++k) {
        const double dphi = -2.0 * std::numbers::pi + 4.0 * std::numbers::pi * k / 99.0;
        const ComplexMatrix u = compose(mzi_network(dphi));
        const double p0 = std::norm(transition_amplitude(u, in, FockState{1, 0}));
        const double p1 = std::norm(transition_amplitude(u, in, FockState{0, 1}));
        const double eta = mzi_effective_reflectivity(dphi);
        const double direct = std::max(std::abs(p0 - eta), std::abs(p1 - (1.0 - eta)));
        const double swapped = std::max(std::abs(p0 - (1.0 - eta)), std::abs(p1 - eta));
        worst = std::max(worst, std::min(direct, swapped));
    }
    return finish("mzi_reflectivity", worst, 1e-12, 100);
}

/// Output distributions sum to one and stay in the input photon-number sector.
inline SuiteResult normalization(std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        const ComplexMatrix u = verify::random_unitary(m, rng);
        const int n = 1 + (trial / 3) % 3;
        for (const auto& in : fock_sector(m, n)) {
            double total = 0.0;
            for (const auto& [out, p] : output_distribution(u, in)) {
                if (out.total_photons() != n) worst = 1.0;
                total += p;
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    return finish("normalization", worst, 1e-10, 100);
}

}  // namespace selftest

inline SelftestReport run_selftest(const SelftestHooks& hooks = {}) {
    SelftestReport report;
    report.suites.push_back(selftest::unitarity());
    report.suites.push_back(selftest::normalization());
    report.suites.push_back(selftest::oracle_equivalence());
    report.suites.push_back(selftest::hom_cancellation(hooks));
    report.suites.push_back(selftest::mzi_reflectivity());
    report.suites.push_back(selftest::visibility_laws(hooks));
    return report;
}

}  // namespace mzi

#endif  // MZI_SELFTEST_HPP
