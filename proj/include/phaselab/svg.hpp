#pragma once
// Self-contained SVG line charts from a Table: log2 x-axis of the iteration
// column, min-max normalized y in [0,1], one polyline per selected column,
// legend in column order. Output bytes depend only on the input.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselab/table.hpp"

namespace phaselab {

struct EmptyTable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingletonTable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlotSpec {
    std::string x_column = "t";
    std::vector<std::string> columns; // y series, plotted in this order
    std::string title;
    int width = 860;
    int height = 480;
};

namespace detail {
inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
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
} // namespace detail

inline std::string render_svg(const Table& t, const PlotSpec& spec) {
    if (t.size() == 0) throw EmptyTable("render_svg: table has no rows");
    if (t.size() == 1) throw SingletonTable("render_svg: cannot plot a single row");
    if (spec.columns.empty()) throw std::invalid_argument("render_svg: no columns selected");

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const long xi = t.column_index(spec.x_column);
    const int margin_l = 64, margin_r = 16, margin_t = 40, margin_b = 48;
    const double pw = spec.width - margin_l - margin_r;
    const double ph = spec.height - margin_t - margin_b;

    // log2(1 + t) keeps t = 0 plottable
    std::vector<double> xs(t.size());
    double xmin = 1e300, xmax = -1e300;
    for (long i = 0; i < t.size(); ++i) {
        xs[i] = std::log2(1.0 + t.rows[i][xi]);
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
    }
    const double xspan = xmax > xmin ? xmax - xmin : 1.0;
    auto px = [&](double x) { return margin_l + (x - xmin) / xspan * pw; };
    auto py = [&](double y) { return margin_t + (1.0 - y) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg += "<text x=\"" + std::to_string(spec.width / 2) +
               "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               detail::xml_escape(spec.title) + "</text>\n";

    // axes
    svg += "<line x1=\"" + detail::fmt2(margin_l) + "\" y1=\"" + detail::fmt2(margin_t) + "\" x2=\"" +
           detail::fmt2(margin_l) + "\" y2=\"" + detail::fmt2(margin_t + ph) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::fmt2(margin_l) + "\" y1=\"" + detail::fmt2(margin_t + ph) +
           "\" x2=\"" + detail::fmt2(margin_l + pw) + "\" y2=\"" + detail::fmt2(margin_t + ph) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + std::to_string(spec.width / 2) + "\" y=\"" +
           std::to_string(spec.height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log2(1 + " +
           detail::xml_escape(spec.x_column) + ")</text>\n";
    svg += "<text x=\"16\" y=\"" + std::to_string(margin_t + static_cast<int>(ph) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
           std::to_string(margin_t + static_cast<int>(ph) / 2) + ")\">normalized</text>\n";

    bool any_flat = false;
    for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
        const long col = t.column_index(spec.columns[ci]);
        double mn = 1e300, mx = -1e300;
        for (long i = 0; i < t.size(); ++i) {
            mn = std::min(mn, t.rows[i][col]);
            mx = std::max(mx, t.rows[i][col]);
        }
        const bool flat = !(mx > mn);
        any_flat = any_flat || flat;
        std::string pts;
        for (long i = 0; i < t.size(); ++i) {
            const double y = flat ? 0.5 : (t.rows[i][col] - mn) / (mx - mn);
            pts += detail::fmt2(px(xs[i])) + "," + detail::fmt2(py(y)) + " ";
        }
        const char* color = kPalette[ci % 8];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
        const int ly = margin_t + 4 + static_cast<int>(ci) * 18;
        svg += "<rect x=\"" + std::to_string(margin_l + 8) + "\" y=\"" + std::to_string(ly) +
               "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + std::to_string(margin_l + 26) + "\" y=\"" + std::to_string(ly + 10) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::xml_escape(spec.columns[ci]) + (flat ? " (constant)" : "") + "</text>\n";
    }
    if (any_flat)
        svg += "<text x=\"" + std::to_string(margin_l + 8) + "\" y=\"" +
               std::to_string(margin_t + static_cast<int>(ph) - 8) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#b00\">warning: constant column drawn at 0.5</text>\n";
    svg += "</svg>\n";
    return svg;
}

} // namespace phaselab
