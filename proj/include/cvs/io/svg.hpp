#pragma once

// Minimal static SVG line charts for the run artifacts (energy traces,
// margins vs time, front snapshots). No interactive display.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

namespace cvs {

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

inline void write_svg_lines(const std::string& path, const std::string& title,
                            const std::vector<PlotSeries>& series) {
    const int W = 800, Hpx = 480, ml = 70, mr = 20, mt = 40, mb = 45;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return Hpx - mb - (y - ymin) / (ymax - ymin) * (Hpx - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ofstream o(path);
    if (!o) throw std::runtime_error("write_svg_lines: cannot open " + path);
    o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << Hpx << "'>\n";
    o << "<rect width='100%' height='100%' fill='white'/>\n";
    o << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title << "</text>\n";
    o << "<line x1='" << ml << "' y1='" << Hpx - mb << "' x2='" << W - mr << "' y2='" << Hpx - mb
      << "' stroke='black'/>\n";
    o << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << Hpx - mb
      << "' stroke='black'/>\n";
    o << "<text x='" << ml - 6 << "' y='" << py(ymin) << "' text-anchor='end' font-size='11'>" << ymin
      << "</text>\n";
    o << "<text x='" << ml - 6 << "' y='" << py(ymax) + 4 << "' text-anchor='end' font-size='11'>" << ymax
      << "</text>\n";
    o << "<text x='" << px(xmin) << "' y='" << Hpx - mb + 16 << "' font-size='11'>" << xmin << "</text>\n";
    o << "<text x='" << px(xmax) << "' y='" << Hpx - mb + 16 << "' text-anchor='end' font-size='11'>"
      << xmax << "</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        const char* col = colors[ci % 6];
        o << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
        for (size_t i = 0; i < s.x.size(); ++i) o << px(s.x[i]) << "," << py(s.y[i]) << " ";
        o << "'/>\n";
        o << "<text x='" << W - mr - 4 << "' y='" << mt + 16 * ci << "' text-anchor='end' fill='" << col
          << "' font-size='12'>" << s.name << "</text>\n";
        ++ci;
    }
    o << "</svg>\n";
}

} // namespace cvs
