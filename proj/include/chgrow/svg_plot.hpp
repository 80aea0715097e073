#pragma once

/// Minimal standalone SVG line plots; the data is embedded in the file so
/// outputs can be inspected offline without a display server.

#include <string>
#include <vector>

namespace chgrow {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // applied when every value is positive
    std::vector<PlotSeries> series;
};

std::string render_svg_plot(const PlotSpec& spec);

}  // namespace chgrow
