#pragma once

// Minimal write-only SVG line plots for profile and rate artifacts.

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nde5 {

inline void write_svg_plot(const std::string& path, const std::vector<double>& x,
                           const std::vector<double>& y, const std::string& title = "") {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("svg: bad series");
    const double W = 960, H = 540, m = 50;
    double xmin = x[0], xmax = x[0], ymin = y[0], ymax = y[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        ymin = std::min(ymin, y[i]);
        ymax = std::max(ymax, y[i]);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double yspan = ymax - ymin;
    ymin -= 0.05 * yspan;
    ymax += 0.05 * yspan;

    std::ofstream os(path);
    if (!os) throw std::runtime_error("svg: cannot open " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    if (!title.empty())
        os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-family='sans-serif'>"
           << title << "</text>\n";
    // zero axis when visible
    if (ymin < 0 && ymax > 0) {
        const double y0 = H - m - (0.0 - ymin) / (ymax - ymin) * (H - 2 * m);
        os << "<line x1='" << m << "' y1='" << y0 << "' x2='" << W - m << "' y2='" << y0
           << "' stroke='#cccccc'/>\n";
    }
    os << "<polyline fill='none' stroke='#1f5fbf' stroke-width='1.2' points='";
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double px = m + (x[i] - xmin) / (xmax - xmin) * (W - 2 * m);
        const double py = H - m - (y[i] - ymin) / (ymax - ymin) * (H - 2 * m);
        os << px << ',' << py << ' ';
    }
    os << "'/>\n</svg>\n";
}

} // namespace nde5
