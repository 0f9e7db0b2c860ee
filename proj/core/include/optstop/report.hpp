#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optstop {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = true;
};

/// Self-contained SVG line chart (no external fonts, scripts or images).
void write_line_plot_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<SvgSeries>& series,
                         int width = 640, int height = 420);

}  // namespace optstop
