#include "chgrow/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace chgrow {

namespace {

constexpr double kWidth = 880.0, kHeight = 560.0;
constexpr double kLeft = 80.0, kRight = 30.0, kTop = 50.0, kBottom = 60.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string render_svg_plot(const PlotSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    bool any = false;
    bool all_positive = true;
    for (const auto& s : spec.series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            any = true;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
            if (s.y[i] <= 0.0) all_positive = false;
        }
    }
    if (!any) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; all_positive = false; }
    const bool logy = spec.log_y && all_positive && ymax / std::max(ymin, 1e-300) > 10.0;
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };
    if (logy) { ymin = ty(ymin); ymax = ty(ymax); }
    if (xmax == xmin) { xmax = xmin + 1.0; }
    if (ymax == ymin) { ymax = ymin + 1.0; ymin -= 1.0; }
    const double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return kTop + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
           "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
           fmt(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"18\">" + spec.title + "</text>\n";
    // axes
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" +
           fmt(kLeft + pw) + "\" y2=\"" + fmt(kTop + ph) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
           "\" y2=\"" + fmt(kTop + ph) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 5.0;
        const double fy = ymin + (ymax - ymin) * k / 5.0;
        out += "<line x1=\"" + fmt(px(fx)) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" +
               fmt(px(fx)) + "\" y2=\"" + fmt(kTop + ph + 6) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + fmt(kTop + ph + 22) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(fx) + "</text>\n";
        out += "<line x1=\"" + fmt(kLeft - 6) + "\" y1=\"" + fmt(py(fy)) + "\" x2=\"" +
               fmt(kLeft) + "\" y2=\"" + fmt(py(fy)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(kLeft - 10) + "\" y=\"" + fmt(py(fy) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(logy ? std::pow(10.0, fy) : fy) + "</text>\n";
    }
    out += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 14) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           spec.x_label + "</text>\n";
    out += "<text x=\"20\" y=\"" + fmt(kTop + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 " + fmt(kTop + ph / 2) + ")\">" +
           (logy ? spec.y_label + " (log scale)" : spec.y_label) + "</text>\n";

    size_t ci = 0;
    double ly = kTop + 8;
    for (const auto& s : spec.series) {
        const char* color = kColors[ci % (sizeof kColors / sizeof *kColors)];
        std::string pts;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (logy && s.y[i] <= 0.0) continue;
            pts += fmt(px(s.x[i])) + "," + fmt(py(ty(s.y[i]))) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        out += "<rect x=\"" + fmt(kLeft + pw - 150) + "\" y=\"" + fmt(ly - 8) +
               "\" width=\"12\" height=\"3\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + fmt(kLeft + pw - 132) + "\" y=\"" + fmt(ly - 3) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
        ly += 18;
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace chgrow
