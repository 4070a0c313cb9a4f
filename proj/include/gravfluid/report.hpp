#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gravfluid/evolve.hpp"

namespace gravfluid {
namespace report {

/// Columns exactly: t, energy_x, norm_drift, harmonic_residual,
/// eps_consistency, a0_min_eig.
void write_monitors_csv(const std::vector<evolve::MonitorRecord>& monitors,
                        const std::string& path);

using Series = std::pair<std::string, std::vector<std::pair<double, double>>>;

/// Static line plot (SVG), optional log-scale ordinate.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<Series>& series, bool logy = false);

}  // namespace report
}  // namespace gravfluid
