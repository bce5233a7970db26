#include "ceit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ceit/errors.hpp"

namespace ceit {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

constexpr double kW = 960.0, kH = 600.0;
constexpr double kMl = 70.0, kMr = 20.0, kMt = 20.0, kMb = 50.0;

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double unit = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
    return unit * mag;
}

void check_series(const std::vector<PlotSeries>& series) {
    if (series.empty())
        throw io_error("plot needs at least one series");
    for (const PlotSeries& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw io_error("plot series '" + s.label +
                           "' is empty or has mismatched columns");
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                throw io_error("plot series '" + s.label + "' has a non-finite sample");
    }
}

} // namespace

std::string render_svg(const std::vector<PlotSeries>& series,
                       const std::string& x_label, const std::string& y_label) {
    check_series(series);

    double xmin = series[0].x[0], xmax = xmin;
    double ymin = series[0].y[0], ymax = ymin;
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto px = [&](double x) {
        return kMl + (x - xmin) / (xmax - xmin) * (kW - kMl - kMr);
    };
    const auto py = [&](double y) {
        return kH - kMb - (y - ymin) / (ymax - ymin) * (kH - kMt - kMb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"600\" "
           "viewBox=\"0 0 960 600\">\n";
    svg += "<rect width=\"960\" height=\"600\" fill=\"#ffffff\"/>\n";

    const double xstep = nice_step(xmax - xmin);
    const double ystep = nice_step(ymax - ymin);
    const long x0 = static_cast<long>(std::ceil(xmin / xstep - 1e-9));
    const long y0 = static_cast<long>(std::ceil(ymin / ystep - 1e-9));

    for (long k = x0; k * xstep <= xmax + 1e-9 * xstep; ++k) {
        const double x = static_cast<double>(k) * xstep;
        const std::string cx = fmt6(px(x));
        svg += "<line x1=\"" + cx + "\" y1=\"" + fmt6(kMt) + "\" x2=\"" + cx +
               "\" y2=\"" + fmt6(kH - kMb) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + cx + "\" y=\"" + fmt6(kH - kMb + 18.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               esc(fmt6(x)) + "</text>\n";
    }
    for (long k = y0; k * ystep <= ymax + 1e-9 * ystep; ++k) {
        const double y = static_cast<double>(k) * ystep;
        const std::string cy = fmt6(py(y));
        svg += "<line x1=\"" + fmt6(kMl) + "\" y1=\"" + cy + "\" x2=\"" +
               fmt6(kW - kMr) + "\" y2=\"" + cy +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt6(kMl - 6.0) + "\" y=\"" + fmt6(py(y) + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               esc(fmt6(y)) + "</text>\n";
    }

    svg += "<rect x=\"" + fmt6(kMl) + "\" y=\"" + fmt6(kMt) + "\" width=\"" +
           fmt6(kW - kMl - kMr) + "\" height=\"" + fmt6(kH - kMt - kMb) +
           "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kPalette[si % kPaletteSize];
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i)
                svg += " ";
            svg += fmt6(px(s.x[i])) + "," + fmt6(py(s.y[i]));
        }
        svg += "\"/>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const double ly = kMt + 16.0 + 18.0 * static_cast<double>(si);
        svg += "<line x1=\"" + fmt6(kW - kMr - 150.0) + "\" y1=\"" + fmt6(ly - 4.0) +
               "\" x2=\"" + fmt6(kW - kMr - 126.0) + "\" y2=\"" + fmt6(ly - 4.0) +
               "\" stroke=\"";
        svg += kPalette[si % kPaletteSize];
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt6(kW - kMr - 120.0) + "\" y=\"" + fmt6(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + esc(series[si].label) +
               "</text>\n";
    }

    svg += "<text x=\"" + fmt6(kMl + (kW - kMl - kMr) / 2.0) + "\" y=\"" +
           fmt6(kH - 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
           esc(x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt6(kMt + (kH - kMt - kMb) / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " +
           fmt6(kMt + (kH - kMt - kMb) / 2.0) + ")\">" + esc(y_label) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string render_dat(const std::vector<PlotSeries>& series) {
    check_series(series);
    std::string out;
    for (std::size_t si = 0; si < series.size(); ++si) {
        if (si)
            out += "\n";
        out += "# " + series[si].label + "\n";
        for (std::size_t i = 0; i < series[si].x.size(); ++i)
            out += fmt17(series[si].x[i]) + " " + fmt17(series[si].y[i]) + "\n";
    }
    return out;
}

} // namespace ceit
