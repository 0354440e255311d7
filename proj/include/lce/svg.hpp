#pragma once

// Minimal self-contained SVG line and step plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace lce::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool step = false;  // draw as a right-continuous staircase
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 440;
    bool log_y = false;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
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

}  // namespace detail

inline std::string plot(const std::vector<Series>& series, const PlotOptions& opt) {
    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = opt.width - left - right, ph = opt.height - top - bottom;

    auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && !(s.y[i] > 0.0))) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x1 > x0)) {
        x0 = std::isfinite(x0) ? x0 - 0.5 : 0.0;
        x1 = x0 + 1.0;
    }
    if (!(y1 > y0)) {
        y0 = std::isfinite(y0) ? y0 - 0.5 : 0.0;
        y1 = y0 + 1.0;
    }
    if (!opt.log_y) y0 = std::min(y0, 0.0);

    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = left + pw * k / 4.0, gy = top + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << gx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << detail::fmt(fx)
           << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
           << detail::fmt(opt.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    os << "<text x=\"" << opt.width / 2.0 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::escape(opt.title) << "</text>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 12 << "\" text-anchor=\"middle\">"
       << detail::escape(opt.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + ph / 2 << ")\">" << detail::escape(opt.y_label) << "</text>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        std::ostringstream pts;
        bool first = true;
        double prev_y = 0.0;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && !(s.y[i] > 0.0))) continue;
            if (s.step && !first) pts << detail::fmt(px(s.x[i])) << ',' << detail::fmt(prev_y) << ' ';
            prev_y = py(s.y[i]);
            pts << detail::fmt(px(s.x[i])) << ',' << detail::fmt(prev_y) << ' ';
            first = false;
        }
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
           << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = top + 14 + 16 * legend_row++;
            os << "<line x1=\"" << left + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw - 130 << "\" y2=\""
               << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << left + pw - 125 << "\" y=\"" << ly << "\">" << detail::escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace lce::svg
