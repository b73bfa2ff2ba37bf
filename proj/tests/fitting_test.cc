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

#include "mzi/fitting.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

using namespace mzi;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

// Noiseless scan sampled straight from a closed-form rate curve, with the
// Poisson error bars a real count at that rate would carry.
ScanResult scan_of(const std::function<double(double)>& rate, const std::vector<double>& xs, double t = 1.0) {
    ScanResult s;
    for (double x : xs) {
        CountRecord r;
        r.setting = x;
        r.integration_time = t;
        r.rate = rate(x);
        r.counts = r.rate * t;
        r.rate_err = std::sqrt(std::max(r.counts, 0.0)) / t;
        s.records.push_back(r);
    }
    return s;
}

ScanResult poisson_scan(const std::function<double(double)>& rate, const std::vector<double>& xs, std::mt19937_64& rng) {
    ScanResult s = scan_of(rate, xs);
    for (auto& r : s.records) {
        r.counts = static_cast<double>(std::poisson_distribution<long>(r.rate)(rng));
        r.rate = r.counts;
        r.rate_err = std::sqrt(r.counts);
    }
    return s;
}

double dip(double x, double base, double v, double t0, double w) {
    return base * (1.0 - v * std::exp(-0.5 * (x - t0) * (x - t0) / (w * w)));
}

}  // namespace

TEST(GaussianDip, recovers_noiseless_parameters) {
    const auto s = scan_of([](double x) { return dip(x, 445.0, 0.95, 12.0, 287.0); }, linspace(-1500.0, 1500.0, 61));
    const FitResult f = fit_gaussian_dip(s);
    EXPECT_NEAR(f.param("R_base"), 445.0, 445.0 * 1e-6);
    EXPECT_NEAR(f.param("V"), 0.95, 0.95 * 1e-6);
    EXPECT_NEAR(f.param("tau0"), 12.0, 287.0 * 1e-6);
    EXPECT_NEAR(f.param("w"), 287.0, 287.0 * 1e-6);
    EXPECT_EQ(f.visibility, f.param("V"));
    EXPECT_FALSE(f.visibility_flagged);
    EXPECT_EQ(f.dof, 61 - 4);
    EXPECT_LT(f.chi2, 1e-12);
    EXPECT_EQ(f.model, "gaussian_dip");
}

TEST(GaussianDip, recovers_random_noiseless_draws) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> base(100.0, 2000.0), vis(0.3, 1.0), t0(-300.0, 300.0), w(150.0, 400.0);
    for (int k = 0; k < 100; ++k) {
        const double b = base(rng), v = vis(rng), c = t0(rng), ww = w(rng);
        const auto s = scan_of([&](double x) { return dip(x, b, v, c, ww); }, linspace(-1500.0, 1500.0, 61));
        const FitResult f = fit_gaussian_dip(s);
        EXPECT_NEAR(f.param("R_base"), b, b * 1e-6) << k;
        EXPECT_NEAR(f.param("V"), v, v * 1e-6) << k;
        EXPECT_NEAR(f.param("tau0"), c, ww * 1e-6) << k;
        EXPECT_NEAR(f.param("w"), ww, ww * 1e-6) << k;
    }
}

TEST(GaussianDip, covariance_is_symmetric_positive_definite) {
    std::mt19937_64 rng(2);
    const auto s = poisson_scan([](double x) { return dip(x, 445.0, 0.8, 0.0, 287.0); }, linspace(-1500.0, 1500.0, 61), rng);
    const FitResult f = fit_gaussian_dip(s);
    EXPECT_LT((f.covariance - f.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-12 * f.covariance.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.covariance);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    EXPECT_EQ(f.residuals.size(), 61u);
    EXPECT_NEAR(f.residual_norm * f.residual_norm, f.chi2, 1e-9 * f.chi2);
}

TEST(GaussianDip, flat_data_gives_null_visibility) {
    std::mt19937_64 rng(23);
    int within = 0;
    const int trials = 50;
    for (int k = 0; k < trials; ++k) {
        const auto s = poisson_scan([](double) { return 445.0; }, linspace(-1500.0, 1500.0, 61), rng);
        try {
            const FitResult f = fit_gaussian_dip(s);
            if (std::abs(f.visibility) <= 3.0 * f.visibility_err + 1e-9) ++within;
        } catch (const FitFailure&) {
            ++within;  // no resolvable dip is also a null result
        }
    }
    EXPECT_GE(within, trials * 9 / 10);
}

TEST(GaussianDip, errors) {
    EXPECT_THROW(fit_gaussian_dip(scan_of([](double) { return 10.0; }, linspace(0.0, 1.0, 4))), CoverageError);
    // zero-variance data: the dip depth and width are unconstrained
    EXPECT_THROW(fit_gaussian_dip(scan_of([](double) { return 445.0; }, linspace(-1500.0, 1500.0, 61))), FitFailure);
}

TEST(GaussianDip, iteration_cap_is_reported) {
    const auto s = scan_of([](double x) { return dip(x, 445.0, 0.95, 400.0, 120.0); }, linspace(-1500.0, 1500.0, 61));
    EXPECT_THROW(fit_gaussian_dip(s, LmOptions{1, 1e-10}), FitFailure);
}

TEST(TwoPhiFringe, recovers_noiseless_parameters) {
    const ThermoOpticCalibration cal;
    const auto s = scan_of([&](double v) { return 650.0 * (1.0 + 0.88 * std::cos(2.0 * (thermo_phase(v, cal) + 0.3))); },
                           linspace(0.0, 25.0, 61));
    const FitResult f = fit_two_phi_fringe(s, cal);
    EXPECT_NEAR(f.param("R0"), 650.0, 650.0 * 1e-6);
    EXPECT_NEAR(f.param("A"), 0.88, 0.88 * 1e-6);
    EXPECT_NEAR(f.param("phi0"), 0.3, 1e-6);
    EXPECT_EQ(f.visibility, f.param("A"));
}

TEST(TwoPhiFringe, recovers_random_noiseless_draws) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> r0(100.0, 3000.0), amp(0.2, 1.0), ph(0.0, pi);
    const ThermoOpticCalibration cal;
    for (int k = 0; k < 100; ++k) {
        const double a = r0(rng), b = amp(rng), c = ph(rng);
        const auto s = scan_of([&](double v) { return a * (1.0 + b * std::cos(2.0 * (thermo_phase(v, cal) + c))); },
                               linspace(0.0, 25.0, 61));
        const FitResult f = fit_two_phi_fringe(s, cal);
        EXPECT_NEAR(f.param("R0"), a, a * 1e-6) << k;
        EXPECT_NEAR(f.param("A"), b, b * 1e-6) << k;
        // phi0 is defined modulo pi
        const double d = std::remainder(f.param("phi0") - c, pi);
        EXPECT_NEAR(d, 0.0, 1e-6) << k;
        EXPECT_GE(f.param("phi0"), 0.0);
        EXPECT_LT(f.param("phi0"), pi);
    }
}

TEST(TwoPhiFringe, phase_reported_modulo_pi) {
    const ThermoOpticCalibration cal;
    const auto s = scan_of([&](double v) { return 500.0 * (1.0 + 0.7 * std::cos(2.0 * (thermo_phase(v, cal) + 3.5))); },
                           linspace(0.0, 25.0, 61));
    const FitResult f = fit_two_phi_fringe(s, cal);
    EXPECT_NEAR(f.param("phi0"), 3.5 - pi, 1e-6);
}

TEST(TwoPhiFringe, voltage_and_phase_axes_agree) {
    std::mt19937_64 rng(4);
    const ThermoOpticCalibration cal;
    const auto volts = poisson_scan(
        [&](double v) { return 650.0 * (1.0 + 0.8 * std::cos(2.0 * thermo_phase(v, cal))); }, linspace(0.0, 25.0, 61),
        rng);
    ScanResult phases = volts;
    for (auto& r : phases.records) r.setting = thermo_phase(r.setting, cal);
    const FitResult a = fit_two_phi_fringe(volts, cal);
    const FitResult b = fit_two_phi_fringe_phase(phases);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(a.params[i], b.params[i], 1e-10 * std::max(1.0, std::abs(a.params[i])));
        EXPECT_NEAR(a.param_errs[i], b.param_errs[i], 1e-8 * a.param_errs[i]);
    }
}

TEST(TwoPhiFringe, insufficient_coverage) {
    const ThermoOpticCalibration cal;
    auto rate = [&](double v) { return 650.0 * (1.0 + 0.8 * std::cos(2.0 * thermo_phase(v, cal))); };
    // 0..10 V spans 1.19 rad < pi
    EXPECT_THROW(fit_two_phi_fringe(scan_of(rate, linspace(0.0, 10.0, 30)), cal), CoverageError);
    EXPECT_THROW(fit_two_phi_fringe(scan_of(rate, linspace(0.0, 25.0, 7)), cal), CoverageError);
}

TEST(FreeFrequency, two_photon_fringe_runs_at_twice_the_phase) {
    const ThermoOpticCalibration cal;
    const auto s = scan_of([&](double v) { return 650.0 * (1.0 + 0.88 * std::cos(2.0 * thermo_phase(v, cal) + 0.4)); },
                           linspace(0.0, 25.0, 61));
    const FitResult f = fit_fringe_free_frequency(s, cal);
    EXPECT_NEAR(f.param("f"), 2.0, 1e-6);
    EXPECT_NEAR(f.param("theta"), 0.4, 1e-6);
    EXPECT_NEAR(f.param("A"), 0.88, 1e-6);
}

TEST(ClassicalCalibration, recovers_heater_coefficient) {
    const ThermoOpticCalibration truth{0.579, 850.0, 0.2};
    const auto s = scan_of([&](double v) { return 10000.0 * (1.0 + std::cos(thermo_phase(v, truth))); },
                           linspace(0.0, 25.0, 61));
    const CalibrationFit c = classical_fringe_calibrate(s, 850.0);
    EXPECT_NEAR(c.calibration.alpha_deg_per_mw, 0.579, 0.579 * 1e-6);
    EXPECT_NEAR(c.calibration.phi0_rad, 0.2, 1e-6);
    EXPECT_NEAR(full_fringe_power_mw(c.calibration), 621.8, 0.05);
    EXPECT_GT(c.alpha_err_deg_per_mw, 0.0);
}

TEST(ClassicalCalibration, needs_a_full_period) {
    const ThermoOpticCalibration truth;
    const auto s = scan_of([&](double v) { return 10000.0 * (1.0 + std::cos(thermo_phase(v, truth))); },
                           linspace(0.0, 18.0, 40));
    EXPECT_THROW(classical_fringe_calibrate(s, 850.0), CoverageError);
    EXPECT_THROW(classical_fringe_calibrate(s, 0.0), ValidationError);
}

TEST(WeightedData, floors_empty_bins) {
    ScanResult s;
    CountRecord r;
    r.integration_time = 2.0;
    s.records.push_back(r);
    EXPECT_DOUBLE_EQ(weighted_data(s).sigma[0], 0.5);
}

TEST(FitResult, lookup_by_name) {
    const auto s = scan_of([](double x) { return dip(x, 445.0, 0.95, 0.0, 287.0); }, linspace(-1500.0, 1500.0, 61));
    const FitResult f = fit_gaussian_dip(s);
    EXPECT_EQ(f.index_of("w"), 3);
    EXPECT_THROW(f.param("nope"), std::out_of_range);
}
