/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The ulsched authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string_view>

namespace ulsched::plot {

namespace {

constexpr double kMarginLeft = 58.0;
constexpr double kMarginRight = 14.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 44.0;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

bool usable(double y, bool log_y) { return std::isfinite(y) && (!log_y || y > 0.0); }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
};

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

std::string tick_label(double v) {
    if (v != 0.0 && (std::abs(v) < 1e-2 || std::abs(v) >= 1e5)) return fmt("%.0e", v);
    return fmt("%g", v);
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    std::vector<double> ticks;

    double frac(double v) const {
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }
};

Axis make_axis(Range r, bool log) {
    Axis a;
    a.log = log;
    if (r.empty()) r = log ? Range{1.0, 10.0} : Range{0.0, 1.0};
    if (log) {
        a.lo = std::pow(10.0, std::floor(std::log10(r.lo)));
        a.hi = std::pow(10.0, std::ceil(std::log10(r.hi)));
        if (a.hi <= a.lo) a.hi = a.lo * 10.0;
        for (double t = a.lo; t <= a.hi * 1.0001; t *= 10.0) a.ticks.push_back(t);
        return a;
    }
    if (r.hi - r.lo < 1e-12) {
        r.lo -= 0.5;
        r.hi += 0.5;
    }
    const double step = nice_step(r.hi - r.lo);
    a.lo = std::floor(r.lo / step) * step;
    a.hi = std::ceil(r.hi / step) * step;
    for (double t = a.lo; t <= a.hi + step * 1e-6; t += step) a.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return a;
}

void render_panel(std::string& svg, const Panel& p, double ox, double w, double h) {
    Range xr, yr;
    for (const auto& s : p.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i], p.log_y)) continue;
            xr.add(s.x[i]);
            const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
            yr.add(s.y[i]);
            if (usable(s.y[i] + e, p.log_y)) yr.add(s.y[i] + e);
            if (usable(s.y[i] - e, p.log_y)) yr.add(s.y[i] - e);
        }
    }
    for (const auto& r : p.ref_lines) {
        if (usable(r.y, p.log_y)) yr.add(r.y);
    }
    if (!p.log_y && !yr.empty()) yr.add(0.0);
    const Axis xa = make_axis(xr, false);
    const Axis ya = make_axis(yr, p.log_y);

    const double px0 = ox + kMarginLeft, px1 = ox + w - kMarginRight;
    const double py0 = kMarginTop, py1 = h - kMarginBottom;
    auto X = [&](double v) { return px0 + xa.frac(v) * (px1 - px0); };
    auto Y = [&](double v) { return py1 - ya.frac(v) * (py1 - py0); };

    svg += "<g>\n";
    svg += "<text x=\"" + fmt("%.1f", (px0 + px1) / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" +
           escape(p.title) + "</text>\n";
    svg += "<rect x=\"" + fmt("%.1f", px0) + "\" y=\"" + fmt("%.1f", py0) + "\" width=\"" +
           fmt("%.1f", px1 - px0) + "\" height=\"" + fmt("%.1f", py1 - py0) +
           "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : xa.ticks) {
        svg += "<line x1=\"" + fmt("%.1f", X(t)) + "\" y1=\"" + fmt("%.1f", py1) + "\" x2=\"" + fmt("%.1f", X(t)) +
               "\" y2=\"" + fmt("%.1f", py1 + 4) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", X(t)) + "\" y=\"" + fmt("%.1f", py1 + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(t) + "</text>\n";
    }
    for (double t : ya.ticks) {
        svg += "<line x1=\"" + fmt("%.1f", px0) + "\" y1=\"" + fmt("%.1f", Y(t)) + "\" x2=\"" + fmt("%.1f", px1) +
               "\" y2=\"" + fmt("%.1f", Y(t)) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", px0 - 5) + "\" y=\"" + fmt("%.1f", Y(t) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(t) + "</text>\n";
    }
    svg += "<text x=\"" + fmt("%.1f", (px0 + px1) / 2) + "\" y=\"" + fmt("%.1f", h - 8) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + escape(p.x_label) + "</text>\n";
    svg += "<text transform=\"translate(" + fmt("%.1f", ox + 14) + "," + fmt("%.1f", (py0 + py1) / 2) +
           ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" + escape(p.y_label) + "</text>\n";

    for (const auto& r : p.ref_lines) {
        if (!usable(r.y, p.log_y)) continue;
        svg += "<line x1=\"" + fmt("%.1f", px0) + "\" y1=\"" + fmt("%.1f", Y(r.y)) + "\" x2=\"" + fmt("%.1f", px1) +
               "\" y2=\"" + fmt("%.1f", Y(r.y)) + "\" stroke=\"#c00\" stroke-dasharray=\"6,3\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", px1 - 3) + "\" y=\"" + fmt("%.1f", Y(r.y) - 3) +
               "\" text-anchor=\"end\" font-size=\"9\" fill=\"#c00\">" + escape(r.label) + "</text>\n";
    }

    double legend_y = py0 + 12;
    for (const auto& s : p.series) {
        std::string path;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i], p.log_y)) continue;
            path += (path.empty() ? "M" : " L") + fmt("%.1f", X(s.x[i])) + "," + fmt("%.1f", Y(s.y[i]));
            svg += "<circle cx=\"" + fmt("%.1f", X(s.x[i])) + "\" cy=\"" + fmt("%.1f", Y(s.y[i])) +
                   "\" r=\"2.2\" fill=\"" + s.color + "\"/>\n";
            if (i < s.err.size() && std::isfinite(s.err[i]) && s.err[i] > 0.0) {
                const double lo = s.y[i] - s.err[i], hi = s.y[i] + s.err[i];
                if (usable(lo, p.log_y) && usable(hi, p.log_y)) {
                    svg += "<line x1=\"" + fmt("%.1f", X(s.x[i])) + "\" y1=\"" + fmt("%.1f", Y(lo)) + "\" x2=\"" +
                           fmt("%.1f", X(s.x[i])) + "\" y2=\"" + fmt("%.1f", Y(hi)) + "\" stroke=\"" + s.color +
                           "\" stroke-opacity=\"0.6\"/>\n";
                }
            }
        }
        if (!path.empty()) {
            svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.4\"" +
                   (s.dashed ? " stroke-dasharray=\"4,3\"" : "") + "/>\n";
        }
        svg += "<line x1=\"" + fmt("%.1f", px0 + 8) + "\" y1=\"" + fmt("%.1f", legend_y) + "\" x2=\"" +
               fmt("%.1f", px0 + 26) + "\" y2=\"" + fmt("%.1f", legend_y) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"1.4\"" + (s.dashed ? " stroke-dasharray=\"4,3\"" : "") + "/>\n";
        svg += "<text x=\"" + fmt("%.1f", px0 + 30) + "\" y=\"" + fmt("%.1f", legend_y + 3) +
               "\" font-size=\"10\">" + escape(s.label) + "</text>\n";
        legend_y += 13;
    }
    svg += "</g>\n";
}

} // namespace

std::string render(const std::vector<Panel>& panels, double panel_width, double panel_height) {
    const double width = panel_width * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
           fmt("%.0f", panel_height) + "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", panel_height) +
           "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        render_panel(svg, panels[i], panel_width * static_cast<double>(i), panel_width, panel_height);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace ulsched::plot
