#pragma once

#include <string>
#include <vector>

namespace ceit {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained 960x600 SVG line plot: white background, light grid, one
// polyline per series in a fixed palette, legend from the labels. Output is
// a pure function of the inputs, so identical data gives identical bytes.
// Throws io_error on empty input or non-finite samples.
std::string render_svg(const std::vector<PlotSeries>& series,
                       const std::string& x_label, const std::string& y_label);

// gnuplot-style blocks: "# label" then "x y" rows (%.17g), blank-line
// separated, one block per series
std::string render_dat(const std::vector<PlotSeries>& series);

} // namespace ceit
