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

#ifndef MZI_IO_PLOT_HPP
#define MZI_IO_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/experiment.hpp"

namespace mzi::io {

struct PlotLabels {
    std::string title;
    std::string x_label;
    std::string y_label = "coincidence rate (counts/s)";
};

inline PlotLabels default_labels(ScanKind kind) {
    switch (kind) {
        case ScanKind::hom: return {"Two-photon delay scan", "relative delay tau (fs)"};
        case ScanKind::noon: return {"Two-photon phase scan", "heater voltage (V)"};
        case ScanKind::singles: return {"Single-photon fringe", "heater voltage (V)", "singles rate (counts/s)"};
        case ScanKind::background: return {"Blocked-input background runs", "blocked input", "rate (counts/s)"};
    }
    return {};
}

struct PlotStatus {
    bool fit_drawn = false;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Roughly `target` round-number tick positions covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

inline std::string tick_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace detail

/// Self-contained SVG: data points with error bars, optional fitted curve.
inline std::string render_svg(const ScanResult& scan, const std::function<double(double)>& fit_curve,
                              const PlotLabels& labels, PlotStatus* status = nullptr) {
    constexpr double width = 720, height = 480, left = 90, right = 30, top = 50, bottom = 70;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (!scan.records.empty()) {
        x_lo = x_hi = scan.records.front().setting;
        y_lo = y_hi = scan.records.front().rate;
        for (const auto& r : scan.records) {
            x_lo = std::min(x_lo, r.setting);
            x_hi = std::max(x_hi, r.setting);
            y_lo = std::min(y_lo, r.rate - r.rate_err);
            y_hi = std::max(y_hi, r.rate + r.rate_err);
        }
    } else if (status) {
        status->warnings.push_back("scan has no records");
    }
    if (x_hi == x_lo) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    std::vector<std::pair<double, double>> curve;
    if (fit_curve) {
        constexpr int samples = 400;
        for (int i = 0; i <= samples; ++i) {
            const double x = x_lo + (x_hi - x_lo) * i / samples;
            const double y = fit_curve(x);
            if (std::isfinite(y)) {
                curve.emplace_back(x, y);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
    }
    y_lo = std::min(y_lo, 0.0);
    const double pad = 0.05 * (y_hi - y_lo > 0 ? y_hi - y_lo : 1.0);
    y_hi += pad;
    if (y_lo < 0.0) y_lo -= pad;

    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"13\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
       << detail::xml_escape(labels.title) << "</text>\n"
       << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : detail::nice_ticks(x_lo, x_hi)) {
        os << "<line x1=\"" << sx(t) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph + 5
           << "\" stroke=\"black\"/>"
           << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">"
           << detail::tick_label(t) << "</text>\n";
    }
    for (double t : detail::nice_ticks(y_lo, y_hi)) {
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << left << "\" y2=\"" << sy(t)
           << "\" stroke=\"black\"/>"
           << "<text x=\"" << left - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">" << detail::tick_label(t)
           << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 20 << "\" text-anchor=\"middle\">"
       << detail::xml_escape(labels.x_label) << "</text>\n"
       << "<text transform=\"translate(22," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << detail::xml_escape(labels.y_label) << "</text>\n";

    os << "<g class=\"data\" stroke=\"black\" fill=\"black\">\n";
    for (const auto& r : scan.records) {
        const double x = sx(r.setting);
        os << "<line x1=\"" << x << "\" y1=\"" << sy(r.rate - r.rate_err) << "\" x2=\"" << x << "\" y2=\""
           << sy(r.rate + r.rate_err) << "\"/>"
           << "<circle cx=\"" << x << "\" cy=\"" << sy(r.rate) << "\" r=\"2.5\"/>\n";
    }
    os << "</g>\n";

    if (!curve.empty()) {
        os << "<polyline class=\"fit\" fill=\"none\" stroke=\"#1f4fd1\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : curve) os << sx(x) << ',' << sy(y) << ' ';
        os << "\"/>\n";
        if (status) status->fit_drawn = true;
    } else if (status) {
        status->warnings.push_back("no fitted curve available; plotting data only");
    }
    os << "</svg>\n";
    return os.str();
}

inline PlotStatus emit_plot(const ScanResult& scan, const std::function<double(double)>& fit_curve,
                            const PlotLabels& labels, const std::filesystem::path& path) {
    PlotStatus status;
    const std::string svg = render_svg(scan, fit_curve, labels, &status);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << svg;
    if (!os) throw IoError("failed writing " + path.string());
    return status;
}

}  // namespace mzi::io

#endif  // MZI_IO_PLOT_HPP
