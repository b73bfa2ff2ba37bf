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

#ifndef MZI_FITTING_HPP
#define MZI_FITTING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mzi/circuit.hpp"
#include "mzi/errors.hpp"
#include "mzi/experiment.hpp"

namespace mzi {

/// Fitted parameters with one-sigma errors from the covariance at the optimum.
/// Errors are absolute: the covariance is not rescaled by the reduced chi^2.
struct FitResult {
    std::string model;
    std::vector<std::string> names;
    Eigen::VectorXd params;
    Eigen::VectorXd param_errs;
    Eigen::MatrixXd covariance;
    std::vector<double> residuals;  ///< (y - f) / sigma per point
    double chi2 = 0.0;
    double residual_norm = 0.0;
    int dof = 0;
    int iterations = 0;
    double visibility = 0.0;
    double visibility_err = 0.0;
    /// Visibility outside [-3 sigma, 1 + 3 sigma].
    bool visibility_flagged = false;

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<int>(i);
        }
        throw std::out_of_range("no fit parameter named " + std::string(name));
    }
    double param(std::string_view name) const { return params[index_of(name)]; }
    double error(std::string_view name) const { return param_errs[index_of(name)]; }
};

struct LmOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;
};

/// Points fed to a weighted least-squares fit.
struct WeightedData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
};

/// Settings, rates and rate errors from a scan. Errors are floored at one
/// count per integration so empty bins do not get infinite weight.
inline WeightedData weighted_data(const ScanResult& scan) {
    WeightedData d;
    for (const CountRecord& r : scan.records) {
        d.x.push_back(r.setting);
        d.y.push_back(r.rate);
        d.sigma.push_back(std::max(r.rate_err, 1.0 / r.integration_time));
    }
    return d;
}

namespace detail {

/// Fills normalized residuals r = (y - f) / sigma and Jacobian J = df/dp / sigma.
template <class Model>
double evaluate_chi2(const Model& model, const Eigen::VectorXd& p, const WeightedData& d, Eigen::VectorXd& r,
                     Eigen::MatrixXd* jac) {
    const auto n = static_cast<Eigen::Index>(d.x.size());
    r.resize(n);
    if (jac) jac->resize(n, p.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        r[i] = (d.y[k] - model.value(d.x[k], p)) / d.sigma[k];
        if (jac) jac->row(i) = model.gradient(d.x[k], p).transpose() / d.sigma[k];
    }
    return r.squaredNorm();
}

inline std::string describe(const Eigen::VectorXd& p) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << "]";
    return os.str();
}

}  // namespace detail

/// Damped Gauss-Newton (Levenberg-Marquardt) on error-weighted residuals.
///
/// Model must provide
///   double value(double x, const Eigen::VectorXd& p) const;
///   Eigen::VectorXd gradient(double x, const Eigen::VectorXd& p) const;
///
/// Throws FitFailure if the step tolerance is not reached within
/// max_iterations, SingularFitError if the normal matrix at the optimum is
/// singular.
template <class Model>
FitResult levenberg_marquardt(const Model& model, std::string model_name, std::vector<std::string> names,
                              Eigen::VectorXd p, const WeightedData& data, const LmOptions& options = {}) {
    const auto npar = p.size();
    if (static_cast<Eigen::Index>(names.size()) != npar) throw std::invalid_argument("one name per parameter");
    if (data.x.size() != data.y.size() || data.x.size() != data.sigma.size()) {
        throw DimensionError("fit data columns differ in length");
    }
    if (static_cast<Eigen::Index>(data.x.size()) <= npar) {
        throw CoverageError(model_name + " fit needs more points than parameters");
    }
    for (double s : data.sigma) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("fit uncertainties must be positive");
    }

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double chi2 = detail::evaluate_chi2(model, p, data, r, &jac);
    if (!std::isfinite(chi2)) throw FitFailure(model_name + " fit: non-finite residuals at the initial guess");

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    Eigen::VectorXd r_try;
    for (; iter < options.max_iterations && !converged; ++iter) {
        const Eigen::MatrixXd a = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool accepted = false;
        Eigen::VectorXd step;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index j = 0; j < npar; ++j) {
                damped(j, j) += lambda * std::max(a(j, j), 1e-300);
            }
            step = damped.ldlt().solve(g);
            if (step.allFinite()) {
                const Eigen::VectorXd p_try = p + step;
                const double chi2_try = detail::evaluate_chi2(model, p_try, data, r_try, nullptr);
                if (std::isfinite(chi2_try) && chi2_try <= chi2) {
                    p = p_try;
                    chi2 = detail::evaluate_chi2(model, p, data, r, &jac);
                    lambda = std::max(lambda * 0.1, 1e-15);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        // No damping level lowers chi^2: the optimum is resolved to rounding.
        if (!accepted) {
            converged = true;
            break;
        }
        if (step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance)) converged = true;
    }
    if (!converged) {
        throw FitFailure(model_name + " fit did not converge after " + std::to_string(iter) +
                         " iterations (chi2 = " + std::to_string(chi2) + ", lambda = " + std::to_string(lambda) +
                         ", params = " + detail::describe(p) + ")");
    }

    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd scale = a.diagonal().cwiseSqrt();
    if ((scale.array() <= 0.0).any() || !scale.allFinite()) {
        throw SingularFitError(model_name + " fit: a parameter has no influence on the residuals");
    }
    const Eigen::MatrixXd normalized = a.array() / (scale * scale.transpose()).array();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
    if (eig.eigenvalues().minCoeff() < 1e-12 * eig.eigenvalues().maxCoeff()) {
        throw SingularFitError(model_name + " fit: normal matrix is singular at the optimum (degenerate data)");
    }
    const Eigen::MatrixXd cov =
        (eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose())
            .array() /
        (scale * scale.transpose()).array();

    FitResult fit;
    fit.model = std::move(model_name);
    fit.names = std::move(names);
    fit.params = p;
    fit.covariance = 0.5 * (cov + cov.transpose());
    fit.param_errs = fit.covariance.diagonal().cwiseSqrt();
    fit.residuals.assign(r.data(), r.data() + r.size());
    fit.chi2 = chi2;
    fit.residual_norm = std::sqrt(chi2);
    fit.dof = static_cast<int>(data.x.size()) - static_cast<int>(npar);
    fit.iterations = iter;
    return fit;
}

namespace detail {

inline void set_visibility(FitResult& fit, std::string_view name) {
    fit.visibility = fit.param(name);
    fit.visibility_err = fit.error(name);
    const double eps = 3.0 * fit.visibility_err;
    fit.visibility_flagged = fit.visibility < -eps || fit.visibility > 1.0 + eps;
}

/// Wraps x into [lo, lo + period).
inline double wrap(double x, double lo, double period) {
    double y = std::fmod(x - lo, period);
    if (y < 0.0) y += period;
    return y + lo;
}

struct GaussianDipModel {
    // p = [R_base, V, tau0, w]
    double value(double x, const Eigen::VectorXd& p) const {
        const double u = (x - p[2]) / p[3];
        return p[0] * (1.0 - p[1] * std::exp(-0.5 * u * u));
    }
    Eigen::VectorXd gradient(double x, const Eigen::VectorXd& p) const {
        const double d = x - p[2];
        const double w = p[3];
        const double g = std::exp(-0.5 * d * d / (w * w));
        Eigen::VectorXd out(4);
        out << 1.0 - p[1] * g, -p[0] * g, -p[0] * p[1] * g * d / (w * w), -p[0] * p[1] * g * d * d / (w * w * w);
        return out;
    }
};

/// R0 (1 + A cos(2 (phi(x) + phi0))), phi(x) supplied by `Phase`.
template <class Phase>
struct TwoPhiFringeModel {
    Phase phase;
    double value(double x, const Eigen::VectorXd& p) const {
        return p[0] * (1.0 + p[1] * std::cos(2.0 * (phase(x) + p[2])));
    }
    Eigen::VectorXd gradient(double x, const Eigen::VectorXd& p) const {
        const double arg = 2.0 * (phase(x) + p[2]);
        const double c = std::cos(arg);
        Eigen::VectorXd out(3);
        out << 1.0 + p[1] * c, p[0] * c, -2.0 * p[0] * p[1] * std::sin(arg);
        return out;
    }
};

/// R0 (1 + A cos(f x + theta)).
struct FreeFrequencyModel {
    double value(double x, const Eigen::VectorXd& p) const {
        return p[0] * (1.0 + p[1] * std::cos(p[2] * x + p[3]));
    }
    Eigen::VectorXd gradient(double x, const Eigen::VectorXd& p) const {
        const double arg = p[2] * x + p[3];
        const double c = std::cos(arg);
        const double s = std::sin(arg);
        Eigen::VectorXd out(4);
        out << 1.0 + p[1] * c, p[0] * c, -p[0] * p[1] * s * x, -p[0] * p[1] * s;
        return out;
    }
};

/// Weighted linear least squares of y on [1, cos(f x), sin(f x)].
/// Returns (chi2, {c0, c_cos, c_sin}).
inline std::pair<double, Eigen::Vector3d> harmonic_projection(const WeightedData& d, double f) {
    const auto n = static_cast<Eigen::Index>(d.x.size());
    Eigen::MatrixXd basis(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double w = 1.0 / d.sigma[k];
        basis(i, 0) = w;
        basis(i, 1) = w * std::cos(f * d.x[k]);
        basis(i, 2) = w * std::sin(f * d.x[k]);
        rhs[i] = w * d.y[k];
    }
    const Eigen::Vector3d c = basis.colPivHouseholderQr().solve(rhs);
    return {(basis * c - rhs).squaredNorm(), c};
}

/// R0, A, theta such that c0 + cc cos(fx) + cs sin(fx) = R0 (1 + A cos(fx + theta)).
inline Eigen::Vector3d amplitude_phase(const Eigen::Vector3d& c) {
    const double r0 = c[0];
    const double amp = std::hypot(c[1], c[2]);
    const double theta = std::atan2(-c[2], c[1]);
    return {r0, r0 != 0.0 ? amp / r0 : 0.0, theta};
}

/// Best harmonic frequency on a grid fine enough that neighbouring trial
/// frequencies differ by pi/8 of accumulated phase over the data span.
inline double periodogram_peak(const WeightedData& d) {
    std::vector<double> xs = d.x;
    std::sort(xs.begin(), xs.end());
    const double span = xs.back() - xs.front();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < xs.size(); ++i) gaps.push_back(xs[i] - xs[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    const double median_gap = gaps[gaps.size() / 2];
    if (!(span > 0.0) || !(median_gap > 0.0)) throw CoverageError("fringe fit needs distinct settings");
    const double f_lo = std::numbers::pi / span;
    const double f_hi = std::numbers::pi / median_gap;
    const double df = std::numbers::pi / (8.0 * span);
    double best_f = f_lo;
    double best_chi2 = std::numeric_limits<double>::infinity();
    for (double f = f_lo; f <= f_hi; f += df) {
        const double chi2 = harmonic_projection(d, f).first;
        if (chi2 < best_chi2) {
            best_chi2 = chi2;
            best_f = f;
        }
    }
    return best_f;
}

inline FitResult fit_free_frequency(const WeightedData& d, std::string model_name, const LmOptions& options) {
    if (d.x.size() < 8) throw CoverageError("free-frequency fringe fit needs at least 8 points");
    const double f0 = periodogram_peak(d);
    const Eigen::Vector3d guess = amplitude_phase(harmonic_projection(d, f0).second);
    Eigen::VectorXd p0(4);
    p0 << guess[0], guess[1], f0, guess[2];
    FitResult fit = levenberg_marquardt(FreeFrequencyModel{}, std::move(model_name), {"R0", "A", "f", "theta"}, p0,
                                        d, options);
    if (fit.params[1] < 0.0) {
        fit.params[1] = -fit.params[1];
        fit.params[3] += std::numbers::pi;
        fit.covariance.row(1) *= -1.0;
        fit.covariance.col(1) *= -1.0;
    }
    if (fit.params[2] < 0.0) {
        fit.params[2] = -fit.params[2];
        fit.params[3] = -fit.params[3];
        fit.covariance.row(2) *= -1.0;
        fit.covariance.col(2) *= -1.0;
        fit.covariance.row(3) *= -1.0;
        fit.covariance.col(3) *= -1.0;
    }
    fit.params[3] = wrap(fit.params[3], -std::numbers::pi, 2.0 * std::numbers::pi);
    set_visibility(fit, "A");
    return fit;
}

/// Two-phi fringe fit on an arbitrary setting-to-phase map.
template <class Phase>
FitResult fit_two_phi(const WeightedData& d, Phase phase, const LmOptions& options) {
    if (d.x.size() < 8) throw CoverageError("fringe fit needs at least 8 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    WeightedData in_phase = d;
    for (double& x : in_phase.x) {
        x = phase(x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi - lo < std::numbers::pi) {
        throw CoverageError("fringe fit needs at least one full 2-phi period (pi rad) of phase coverage");
    }
    // harmonic 2 projection: c0 + a cos 2phi + b sin 2phi
    const Eigen::Vector3d guess = amplitude_phase(harmonic_projection(in_phase, 2.0).second);
    Eigen::VectorXd p0(3);
    p0 << guess[0], guess[1], 0.5 * guess[2];
    FitResult fit = levenberg_marquardt(TwoPhiFringeModel<Phase>{phase}, "two_phi_fringe", {"R0", "A", "phi0"}, p0,
                                        d, options);
    if (fit.params[1] < 0.0) {
        fit.params[1] = -fit.params[1];
        fit.params[2] += 0.5 * std::numbers::pi;
        fit.covariance.row(1) *= -1.0;
        fit.covariance.col(1) *= -1.0;
    }
    fit.params[2] = wrap(fit.params[2], 0.0, std::numbers::pi);
    set_visibility(fit, "A");
    return fit;
}

}  // namespace detail

/// Gaussian dip R(tau) = R_base (1 - V exp(-(tau - tau0)^2 / (2 w^2))).
/// Visibility is V = (R_max - R_min) / R_max.
inline FitResult fit_gaussian_dip(const ScanResult& data, const LmOptions& options = {}) {
    const WeightedData d = weighted_data(data);
    const std::size_t n = d.x.size();
    if (n < 5) throw CoverageError("Gaussian dip fit needs at least 5 points");

    // initial guess from a 3-point moving average
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = std::min(i + 1, n - 1);
        double s = 0.0;
        for (std::size_t k = a; k <= b; ++k) s += d.y[k];
        smooth[i] = s / static_cast<double>(b - a + 1);
    }
    const auto [min_it, max_it] = std::minmax_element(smooth.begin(), smooth.end());
    const std::size_t imin = static_cast<std::size_t>(min_it - smooth.begin());
    const double base = *max_it;
    const double depth = base - *min_it;
    const double half = base - 0.5 * depth;
    auto crossing = [&](int dir) -> double {
        for (auto i = static_cast<std::ptrdiff_t>(imin); i >= 0 && i < static_cast<std::ptrdiff_t>(n); i += dir) {
            const auto k = static_cast<std::size_t>(i);
            if (smooth[k] >= half && k != imin) {
                const std::size_t prev = static_cast<std::size_t>(i - dir);
                const double t = (half - smooth[prev]) / (smooth[k] - smooth[prev]);
                return std::abs(d.x[prev] + t * (d.x[k] - d.x[prev]) - d.x[imin]);
            }
        }
        return -1.0;
    };
    const double left = crossing(-1);
    const double right = crossing(+1);
    double hwhm = 0.0;
    if (left > 0.0 && right > 0.0) {
        hwhm = 0.5 * (left + right);
    } else if (left > 0.0 || right > 0.0) {
        hwhm = std::max(left, right);
    } else {
        hwhm = 0.25 * std::abs(d.x.back() - d.x.front());
    }
    if (!(hwhm > 0.0)) hwhm = std::abs(d.x.back() - d.x.front()) / static_cast<double>(n);

    Eigen::VectorXd p0(4);
    p0 << base, base != 0.0 ? depth / base : 0.0, d.x[imin], hwhm / std::sqrt(2.0 * std::numbers::ln2);
    FitResult fit = levenberg_marquardt(detail::GaussianDipModel{}, "gaussian_dip", {"R_base", "V", "tau0", "w"}, p0,
                                        d, options);
    if (fit.params[3] < 0.0) {
        fit.params[3] = -fit.params[3];
        fit.covariance.row(3) *= -1.0;
        fit.covariance.col(3) *= -1.0;
    }
    detail::set_visibility(fit, "V");
    return fit;
}

/// R(V) = R0 (1 + A cos(2 (phi(V) + phi0))) with phi(V) from the heater
/// calibration. A = (R_max - R_min) / (R_max + R_min); phi0 reported in [0, pi).
inline FitResult fit_two_phi_fringe(const ScanResult& data, const ThermoOpticCalibration& cal,
                                    const LmOptions& options = {}) {
    cal.validate();
    return detail::fit_two_phi(
        weighted_data(data), [cal](double volts) { return thermo_phase(volts, cal); }, options);
}

/// Same model with settings already expressed as phase (rad).
inline FitResult fit_two_phi_fringe_phase(const ScanResult& data, const LmOptions& options = {}) {
    return detail::fit_two_phi(weighted_data(data), [](double phi) { return phi; }, options);
}

/// R0 (1 + A cos(f phi + theta)) with f free; settings converted to phase via cal.
inline FitResult fit_fringe_free_frequency(const ScanResult& data, const ThermoOpticCalibration& cal,
                                           const LmOptions& options = {}) {
    cal.validate();
    WeightedData d = weighted_data(data);
    for (double& x : d.x) x = thermo_phase(x, cal);
    return detail::fit_free_frequency(d, "free_frequency_fringe", options);
}

struct CalibrationFit {
    ThermoOpticCalibration calibration;
    double alpha_err_deg_per_mw = 0.0;
    double phi0_err_rad = 0.0;
    FitResult fit;
};

/// Heater calibration from a single-photon fringe over voltage:
/// R(P) = R0 (1 + A cos(alpha P + phi0)), P = V^2 / R. Needs a full period in P.
inline CalibrationFit classical_fringe_calibrate(const ScanResult& singles, double resistance_ohm,
                                                 const LmOptions& options = {}) {
    if (!(resistance_ohm > 0.0)) throw ValidationError("heater resistance must be > 0 ohm");
    WeightedData d = weighted_data(singles);
    for (double& v : d.x) {
        if (v < 0.0) throw ValidationError("heater voltage must be >= 0");
        v = dissipated_power_mw(v, resistance_ohm);
    }
    FitResult fit = detail::fit_free_frequency(d, "classical_fringe", options);
    const auto [lo, hi] = std::minmax_element(d.x.begin(), d.x.end());
    if (fit.param("f") * (*hi - *lo) < 2.0 * std::numbers::pi) {
        throw CoverageError("singles scan covers less than one full fringe period in heater power");
    }
    CalibrationFit out;
    constexpr double deg = 180.0 / std::numbers::pi;
    out.calibration.alpha_deg_per_mw = fit.param("f") * deg;
    out.calibration.resistance_ohm = resistance_ohm;
    out.calibration.phi0_rad = fit.param("theta");
    out.alpha_err_deg_per_mw = fit.error("f") * deg;
    out.phi0_err_rad = fit.error("theta");
    out.fit = std::move(fit);
    return out;
}

}  // namespace mzi

#endif  // MZI_FITTING_HPP
