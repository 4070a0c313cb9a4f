#include "gravfluid/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gravfluid/errors.hpp"

namespace gravfluid {
namespace report {

void write_monitors_csv(const std::vector<evolve::MonitorRecord>& monitors,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(17);
    out << "t,energy_x,norm_drift,harmonic_residual,eps_consistency,a0_min_eig\n";
    for (const auto& m : monitors)
        out << m.t << "," << m.energy_x << "," << m.norm_drift << "," << m.harmonic_residual
            << "," << m.eps_consistency << "," << m.a0_min_eig << "\n";
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<Series>& series, bool logy) {
    const int W = 720, H = 420, ml = 70, mr = 20, mt = 40, mb = 40;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto yval = [&](double y) { return logy ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, yval(y));
            ymax = std::max(ymax, yval(y));
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (yval(y) - ymin) / (ymax - ymin) * (H - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << (logy ? " (log10 y)" : "") << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        out << "<text x='" << X(fx) << "' y='" << H - mb + 16
            << "' text-anchor='middle' font-size='11'>" << fx << "</text>\n";
        out << "<text x='" << ml - 6 << "' y='" << H - mb - (H - mt - mb) * i / 4.0 + 4
            << "' text-anchor='end' font-size='11'>" << fy << "</text>\n";
    }
    int ci = 0;
    for (const auto& [name, pts] : series) {
        const char* col = colors[ci % 5];
        out << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) out << X(x) << "," << Y(y) << " ";
        out << "'/>\n";
        out << "<text x='" << W - mr - 6 << "' y='" << mt + 16 * ci
            << "' text-anchor='end' font-size='12' fill='" << col << "'>" << name << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

}  // namespace report
}  // namespace gravfluid
