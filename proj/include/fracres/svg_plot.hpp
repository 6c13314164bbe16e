#ifndef FRACRES_SVG_PLOT_HPP
#define FRACRES_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracres/csv.hpp"

namespace fracres {

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

/// Tick step of the form {1,2,5} x 10^k closest below range/target.
inline double nice_step(double range, int target) {
    if (!(range > 0)) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag * (1 + 1e-12)) return m * mag;
    return 10.0 * mag;
}

}  // namespace detail

/*
 * Deterministic line plot: fixed viewBox, axes with tick labels, one
 * polyline per selected column against the first column of the series, and
 * a legend. Throws before touching the output file when a column is
 * unknown or there is nothing to draw.
 */
inline std::string render_line_plot_svg(const TimeSeries& ts,
                                        const std::vector<std::string>& columns) {
    if (columns.empty()) throw std::invalid_argument("plot: no columns selected");
    if (ts.rows.empty()) throw std::invalid_argument("plot: series has no data rows");

    std::vector<std::size_t> cols;
    for (const auto& name : columns) cols.push_back(ts.column_index(name));

    const double width = 960, height = 600;
    const double ml = 80, mr = 30, mt = 30, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = ts.rows.front()[0], xmax = xmin;
    double ymin = ts.rows.front()[cols[0]], ymax = ymin;
    for (const auto& row : ts.rows) {
        xmin = std::min(xmin, row[0]);
        xmax = std::max(xmax, row[0]);
        for (auto c : cols) {
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const std::size_t ncolors = sizeof(palette) / sizeof(palette[0]);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 600\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"600\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << detail::fmt_coord(ml) << "\" y=\"" << detail::fmt_coord(mt)
        << "\" width=\"" << detail::fmt_coord(pw) << "\" height=\"" << detail::fmt_coord(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xstep = detail::nice_step(xmax - xmin, 6);
    for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-12 * xstep; x += xstep) {
        const double px = sx(x);
        svg << "<line x1=\"" << detail::fmt_coord(px) << "\" y1=\"" << detail::fmt_coord(mt + ph)
            << "\" x2=\"" << detail::fmt_coord(px) << "\" y2=\""
            << detail::fmt_coord(mt + ph + 6) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << detail::fmt_coord(px) << "\" y=\""
            << detail::fmt_coord(mt + ph + 22)
            << "\" font-size=\"13\" text-anchor=\"middle\">" << detail::fmt_tick(x)
            << "</text>\n";
    }
    const double ystep = detail::nice_step(ymax - ymin, 6);
    for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-12 * ystep; y += ystep) {
        const double py = sy(y);
        svg << "<line x1=\"" << detail::fmt_coord(ml - 6) << "\" y1=\"" << detail::fmt_coord(py)
            << "\" x2=\"" << detail::fmt_coord(ml) << "\" y2=\"" << detail::fmt_coord(py)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << detail::fmt_coord(ml - 10) << "\" y=\""
            << detail::fmt_coord(py + 4) << "\" font-size=\"13\" text-anchor=\"end\">"
            << detail::fmt_tick(y) << "</text>\n";
    }
    svg << "<text x=\"" << detail::fmt_coord(ml + pw / 2) << "\" y=\""
        << detail::fmt_coord(height - 12) << "\" font-size=\"15\" text-anchor=\"middle\">"
        << ts.columns[0] << "</text>\n";

    for (std::size_t s = 0; s < cols.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[s % ncolors]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& row : ts.rows)
            svg << detail::fmt_coord(sx(row[0])) << "," << detail::fmt_coord(sy(row[cols[s]]))
                << " ";
        svg << "\"/>\n";
    }

    for (std::size_t s = 0; s < cols.size(); ++s) {
        const double ly = mt + 16 + 20 * s;
        svg << "<line x1=\"" << detail::fmt_coord(ml + pw - 150) << "\" y1=\""
            << detail::fmt_coord(ly - 4) << "\" x2=\"" << detail::fmt_coord(ml + pw - 120)
            << "\" y2=\"" << detail::fmt_coord(ly - 4) << "\" stroke=\"" << palette[s % ncolors]
            << "\" stroke-width=\"3\"/>\n";
        svg << "<text x=\"" << detail::fmt_coord(ml + pw - 112) << "\" y=\""
            << detail::fmt_coord(ly) << "\" font-size=\"13\">" << columns[s] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void write_line_plot_svg(const TimeSeries& ts, const std::vector<std::string>& columns,
                                const std::string& path) {
    const std::string body = render_line_plot_svg(ts, columns);  // validate before opening
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
}

}  // namespace fracres

#endif
