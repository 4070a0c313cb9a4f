#pragma once

#include <array>
#include <string>
#include <vector>

#include "gravfluid/eos.hpp"
#include "gravfluid/evolve.hpp"
#include "gravfluid/field.hpp"
#include "gravfluid/wsobolev.hpp"

namespace gravfluid {
namespace scenario {

enum class Recipe { MinkowskiVacuum, GaugeWave, FlatWave, FluidBall, SoundWave, File };

struct Scenario {
    std::string name = "unnamed";
    GridSpec grid;
    EquationOfState eos;
    Recipe recipe = Recipe::MinkowskiVacuum;

    // gauge-wave
    double amplitude = 1e-6;
    int wave_k = 1;
    std::string tensor = "plus";  // plus | cross | xx

    // fluid-ball
    double w_amplitude = 0.3;
    double radius = 1.0;
    double rho = 0.0;
    double big_m = 2.0;
    double mollifier_width = 0.0;  // 0 = tied to grid spacing
    std::string profile = "smooth";  // smooth | bump2
    std::array<double, 3> ubar{0.0, 0.0, 0.0};

    // sound-wave
    double w_background = 0.4;

    std::string file_path;

    wsobolev::NormSpec norms;
    int box_points = 0;  // 0 = auto per dimension
    evolve::EvolutionConfig evo;

    bool allow_large_gamma = false;
    std::vector<std::string> warnings;
};

/// Parse the key-value scenario grammar (sections in braces, '#' comments).
/// Throws ParseError with a line number, then ValidationError on bad fields.
/// strict_window promotes the regularity-window warning to an error.
Scenario parse_scenario(const std::string& text, bool strict_window = false);
Scenario load_scenario(const std::string& path, bool strict_window = false);

/// Initial coupled state per the scenario recipe.
Field build_initial_state(const Scenario& sc);

int default_box_points(int dim);

struct RunOptions {
    std::string outdir = ".";
    int threads = 0;  // 0 = leave as configured
    unsigned seed = 0;
};

struct RunOutcome {
    bool checks_pass = true;
    std::vector<std::string> failures;
    std::vector<evolve::MonitorRecord> monitors;
    evolve::GronwallFit gronwall;
    std::vector<double> picard_ratios;
};

/// Evolve per the scenario and write monitors.csv, state dumps, norm reports,
/// plots, and summary.json into outdir. Numerical failures propagate as
/// exceptions; check failures are returned in the outcome.
RunOutcome run_scenario(const Scenario& sc, const RunOptions& opt);

/// Norm report rows for the scenario's initial data (check-norms verb).
void write_norm_report(const Scenario& sc, const std::string& path);

/// Refinement study: doubles the grid `levels-1` times, reports sup drifts
/// and measured orders. Returns rows {n, drift, drift_order, fmu, fmu_order}.
struct ConvergenceRow {
    int n = 0;
    double norm_drift = 0.0;
    double drift_order = 0.0;
    double harmonic_residual = 0.0;
    double fmu_order = 0.0;
};
std::vector<ConvergenceRow> convergence_study(const Scenario& sc, int levels,
                                              const RunOptions& opt);

/// Admissible window (3/2, 2/(gamma-1) + 1/2) for the regularity parameter.
std::pair<double, double> regularity_window(const EquationOfState& eos);

}  // namespace scenario
}  // namespace gravfluid
