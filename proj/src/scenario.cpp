#include "gravfluid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gravfluid/fluid.hpp"
#include "gravfluid/geometry.hpp"
#include "gravfluid/initial_data.hpp"
#include "gravfluid/reduction.hpp"
#include "gravfluid/report.hpp"
#include "json.hpp"

namespace gravfluid {
namespace scenario {

namespace {

struct KvStore {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get(const std::string& key, const std::string& dflt) const {
        auto it = values.find(key);
        return it == values.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = values.find(key);
        if (it == values.end()) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ParseError(lines.at(key), "expected a number for '" + key + "', got '" +
                                                it->second + "'");
        }
    }

    int get_int(const std::string& key, int dflt) const {
        const double v = get_double(key, dflt);
        if (v != std::floor(v))
            throw ParseError(lines.at(key), "expected an integer for '" + key + "'");
        return int(v);
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = values.find(key);
        if (it == values.end()) return dflt;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ParseError(lines.at(key), "expected true/false for '" + key + "'");
    }

    std::array<double, 3> get_vec3(const std::string& key, std::array<double, 3> dflt) const {
        auto it = values.find(key);
        if (it == values.end()) return dflt;
        std::array<double, 3> out{0, 0, 0};
        std::stringstream ss(it->second);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',') && i < 3) {
            try {
                out[i++] = std::stod(tok);
            } catch (...) {
                throw ParseError(lines.at(key), "expected a,b,c numbers for '" + key + "'");
            }
        }
        if (i != 3) throw ParseError(lines.at(key), "expected three components for '" + key + "'");
        return out;
    }
};

struct Token {
    std::string text;
    int line;
};

/// Whitespace-separated tokens with '{', '}' and '=' as punctuation;
/// '#' comments run to the end of the line.
std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back({cur, line});
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '#') {
            flush();
            while (i < text.size() && text[i] != '\n') ++i;
            --i;
        } else if (c == '\n') {
            flush();
            ++line;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            flush();
        } else if (c == '{' || c == '}' || c == '=') {
            flush();
            out.push_back({std::string(1, c), line});
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

KvStore tokenize(const std::string& text) {
    KvStore kv;
    std::vector<std::string> stack;
    const auto tokens = lex(text);
    std::size_t i = 0;
    while (i < tokens.size()) {
        const Token& tok = tokens[i];
        if (tok.text == "}") {
            if (stack.empty()) throw ParseError(tok.line, "unmatched '}'");
            stack.pop_back();
            ++i;
            continue;
        }
        if (tok.text == "{" || tok.text == "=")
            throw ParseError(tok.line, "expected a key or section name");
        if (i + 1 >= tokens.size())
            throw ParseError(tok.line, "dangling identifier '" + tok.text + "'");
        const Token& next = tokens[i + 1];
        if (next.text == "{") {
            stack.push_back(tok.text);
            i += 2;
            continue;
        }
        if (next.text != "=")
            throw ParseError(next.line, "expected '=' or '{' after '" + tok.text + "'");
        if (i + 2 >= tokens.size() || tokens[i + 2].text == "{" || tokens[i + 2].text == "}" ||
            tokens[i + 2].text == "=")
            throw ParseError(next.line, "missing value for '" + tok.text + "'");
        std::string full;
        for (const auto& s : stack) full += s + ".";
        full += tok.text;
        if (kv.values.count(full)) throw ParseError(tok.line, "duplicate key '" + full + "'");
        kv.values[full] = tokens[i + 2].text;
        kv.lines[full] = tok.line;
        i += 3;
    }
    if (!stack.empty())
        throw ParseError(tokens.empty() ? 1 : tokens.back().line,
                         "unterminated section '" + stack.back() + "'");
    return kv;
}

double max_initial_w(const Scenario& sc) {
    switch (sc.recipe) {
        case Recipe::FluidBall:
            return sc.w_amplitude + sc.rho;
        case Recipe::SoundWave:
            return sc.w_background + sc.amplitude;
        default:
            return 0.0;
    }
}

}  // namespace

std::pair<double, double> regularity_window(const EquationOfState& eos) {
    return {1.5, eos.beta() + 0.5};
}

Scenario parse_scenario(const std::string& text, bool strict_window) {
    const KvStore kv = tokenize(text);
    Scenario sc;
    sc.name = kv.get("name", "unnamed");

    sc.grid.n = {kv.get_int("grid.nx", 64), kv.get_int("grid.ny", 1), kv.get_int("grid.nz", 1)};
    const double ext = kv.get_double("grid.extent", 2.0 * M_PI);
    sc.grid.extent = {kv.get_double("grid.extent_x", ext), kv.get_double("grid.extent_y", ext),
                      kv.get_double("grid.extent_z", ext)};
    const std::string bnd = kv.get("grid.boundary", "periodic");
    if (bnd == "periodic")
        sc.grid.boundary = BoundaryMode::Periodic;
    else if (bnd == "frozen-exterior")
        sc.grid.boundary = BoundaryMode::FrozenExterior;
    else
        throw ValidationError("grid.boundary", "must be periodic or frozen-exterior");
    sc.grid.fd_order = kv.get_int("grid.fd_order", 4);
    sc.grid.validate();
    if (sc.grid.npoints() > std::size_t(64) * 64 * 64 && !kv.get_bool("grid.allow_large", false))
        throw ValidationError("grid.n", "grids above 64^3 need grid.allow_large = true");

    const double K = kv.get_double("eos.K", 1.0);
    const double gamma = kv.get_double("eos.gamma", 2.0);
    sc.allow_large_gamma = kv.get_bool("eos.allow_large_gamma", false);
    sc.eos = EquationOfState(K, gamma);
    if (gamma > 3.0 && !sc.allow_large_gamma)
        throw ValidationError("eos.gamma",
                              "gamma > 3 makes beta = 2/(gamma-1) < 1; set "
                              "eos.allow_large_gamma to override");

    const std::string recipe = kv.get("initial.recipe", "minkowski-vacuum");
    if (recipe == "minkowski-vacuum")
        sc.recipe = Recipe::MinkowskiVacuum;
    else if (recipe == "gauge-wave")
        sc.recipe = Recipe::GaugeWave;
    else if (recipe == "flat-wave")
        sc.recipe = Recipe::FlatWave;
    else if (recipe == "fluid-ball")
        sc.recipe = Recipe::FluidBall;
    else if (recipe == "sound-wave")
        sc.recipe = Recipe::SoundWave;
    else if (recipe == "file")
        sc.recipe = Recipe::File;
    else
        throw ValidationError("initial.recipe", "unknown recipe '" + recipe + "'");

    sc.amplitude = kv.get_double("initial.amplitude", sc.recipe == Recipe::SoundWave ? 1e-6 : 1e-6);
    sc.wave_k = kv.get_int("initial.k", 1);
    sc.tensor = kv.get("initial.tensor", "plus");
    if (sc.tensor != "plus" && sc.tensor != "cross" && sc.tensor != "xx")
        throw ValidationError("initial.tensor", "must be plus, cross or xx");
    sc.w_amplitude = kv.get_double("initial.w_amplitude", 0.3);
    sc.radius = kv.get_double("initial.radius", 1.0);
    sc.rho = kv.get_double("initial.rho", 0.0);
    sc.big_m = kv.get_double("initial.M", 2.0);
    sc.mollifier_width = kv.get_double("initial.mollifier_width", 0.0);
    sc.profile = kv.get("initial.profile", "smooth");
    if (sc.profile != "smooth" && sc.profile != "bump2" && sc.profile != "gauss")
        throw ValidationError("initial.profile", "must be smooth, bump2 or gauss");
    sc.ubar = kv.get_vec3("initial.ubar", {0.0, 0.0, 0.0});
    sc.w_background = kv.get_double("initial.w0", 0.4);
    sc.file_path = kv.get("initial.path", "");
    if (sc.recipe == Recipe::File && sc.file_path.empty())
        throw ValidationError("initial.path", "file recipe needs a path");
    if (sc.w_amplitude < 0.0 || sc.rho < 0.0)
        throw ValidationError("initial.w_amplitude", "fluid amplitudes must be nonnegative");

    sc.norms.s = kv.get_double("norms.s", 2.0);
    sc.norms.delta = kv.get_double("norms.delta", 0.0);
    sc.norms.gamma_psi = kv.get_double("norms.gamma_psi", 1.0);
    if (sc.norms.s <= 0.0) throw ValidationError("norms.s", "regularity must be positive");
    sc.norms.validate();
    sc.box_points = kv.get_int("norms.box_points", 0);

    const auto [wlo, whi] = regularity_window(sc.eos);
    if (sc.norms.s <= wlo || sc.norms.s >= whi) {
        std::ostringstream msg;
        msg << "norms.s = " << sc.norms.s << " lies outside the regularity window (" << wlo
            << ", " << whi << ") for gamma = " << gamma;
        if (strict_window) throw ValidationError("norms.s", msg.str());
        sc.warnings.push_back("WARNING: " + msg.str());
    }

    sc.evo.dt = kv.get_double("evolve.dt", 0.0);
    sc.evo.t_end = kv.get_double("evolve.t_end", 1.0);
    sc.evo.cfl = kv.get_double("evolve.cfl", 0.4);
    sc.evo.picard_iters = kv.get_int("evolve.picard_iters", 6);
    sc.evo.monitor_every = kv.get_int("evolve.monitor_every", 8);
    sc.evo.freeze_metric = kv.get_bool("evolve.freeze_metric", false);
    sc.evo.signature_check_each_step = kv.get_bool("evolve.signature_check", false);
    const std::string mode = kv.get("evolve.mode", "direct");
    if (mode == "direct")
        sc.evo.mode = evolve::Mode::Direct;
    else if (mode == "picard")
        sc.evo.mode = evolve::Mode::Picard;
    else
        throw ValidationError("evolve.mode", "must be direct or picard");
    if (sc.evo.cfl <= 0.0 || sc.evo.cfl > 1.0)
        throw ValidationError("evolve.cfl", "cfl must lie in (0, 1]");
    if (sc.evo.t_end <= 0.0) throw ValidationError("evolve.t_end", "t_end must be positive");
    if (sc.evo.picard_iters < 2)
        throw ValidationError("evolve.picard_iters", "need at least 2 iterations");

    const double wmax = max_initial_w(sc);
    const double s2 = std::pow(sc.eos.sound_speed(wmax), 2);
    if (s2 >= 1.0 - fluid::kCausalityMargin)
        throw ValidationError("initial",
                              "initial sound speed violates causality: sigma^2 = " +
                                  std::to_string(s2));
    return sc;
}

Scenario load_scenario(const std::string& path, bool strict_window) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), strict_window);
}

int default_box_points(int dim) { return dim == 1 ? 1024 : dim == 2 ? 128 : 48; }

namespace {

void wave_tensor(const std::string& id, double T[6]) {
    for (int i = 0; i < 6; ++i) T[i] = 0.0;
    if (id == "plus") {
        T[sym3(1, 1)] = 1.0;
        T[sym3(2, 2)] = -1.0;
    } else if (id == "cross") {
        T[sym3(1, 2)] = 1.0;
    } else {
        T[sym3(0, 0)] = 1.0;
    }
}

}  // namespace

Field build_initial_state(const Scenario& sc) {
    const GridSpec& grid = sc.grid;
    Field w(grid, 1), u(grid, 4);
    for (std::size_t p = 0; p < grid.npoints(); ++p) u.at(p, 0) = 1.0;

    switch (sc.recipe) {
        case Recipe::File: {
            Field U = read_binary(sc.file_path);
            if (U.ncomp() != layout::nU)
                throw ValidationError("initial.path", "state file must carry 55 components");
            return U;
        }
        case Recipe::MinkowskiVacuum: {
            initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
            for (std::size_t p = 0; p < grid.npoints(); ++p)
                for (int a = 0; a < 3; ++a) geo.h.at(p, sym3(a, a)) = 1.0;
            const auto slice = initial_data::complete_gauge_data(geo);
            return reduction::pack_state(slice.g, slice.dtg, w, u, sc.eos);
        }
        case Recipe::GaugeWave: {
            double T[6];
            wave_tensor(sc.tensor, T);
            const double kappa = 2.0 * M_PI * sc.wave_k / grid.extent[0];
            initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
            for (std::size_t p = 0; p < grid.npoints(); ++p) {
                const double x = grid.point(p)[0];
                for (int s = 0; s < 6; ++s) {
                    geo.h.at(p, s) = (s == 0 || s == 3 || s == 5 ? 1.0 : 0.0) +
                                     sc.amplitude * std::sin(kappa * x) * T[s];
                    geo.K.at(p, s) = 0.5 * sc.amplitude * kappa * std::cos(kappa * x) * T[s];
                }
            }
            const auto slice = initial_data::complete_gauge_data(geo);
            return reduction::pack_state(slice.g, slice.dtg, w, u, sc.eos);
        }
        case Recipe::FlatWave: {
            // slice of flat spacetime in wavy coordinates: the vacuum
            // constraints hold exactly, so F^mu stays zero in the continuum
            const double kappa = 2.0 * M_PI * sc.wave_k / grid.extent[0];
            initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
            for (std::size_t p = 0; p < grid.npoints(); ++p) {
                const double x = grid.point(p)[0];
                const double f = 1.0 - sc.amplitude * std::sin(kappa * x);
                geo.h.at(p, sym3(0, 0)) = f;
                geo.h.at(p, sym3(1, 1)) = 1.0;
                geo.h.at(p, sym3(2, 2)) = 1.0;
                geo.K.at(p, sym3(0, 0)) =
                    -sc.amplitude * kappa * std::cos(kappa * x) / (2.0 * std::sqrt(f));
            }
            const auto slice = initial_data::complete_gauge_data(geo);
            return reduction::pack_state(slice.g, slice.dtg, w, u, sc.eos);
        }
        case Recipe::FluidBall: {
            initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
            for (std::size_t p = 0; p < grid.npoints(); ++p)
                for (int a = 0; a < 3; ++a) geo.h.at(p, sym3(a, a)) = 1.0;
            Field w_raw(grid, 1);
            for (std::size_t p = 0; p < grid.npoints(); ++p) {
                const auto x = grid.point(p);
                double r2 = 0.0;
                for (int a = 0; a < 3; ++a)
                    if (grid.active(a)) r2 += x[a] * x[a];
                const double q2 = r2 / (sc.radius * sc.radius);
                if (sc.profile == "gauss")
                    w_raw.at(p, 0) = sc.w_amplitude * std::exp(-q2);
                else if (q2 < 1.0)
                    w_raw.at(p, 0) = sc.profile == "smooth"
                                         ? sc.w_amplitude * std::exp(1.0 - 1.0 / (1.0 - q2))
                                         : sc.w_amplitude * (1.0 - q2) * (1.0 - q2);
            }
            w = initial_data::regularize_initial(w_raw, sc.rho, sc.big_m, sc.mollifier_width);
            Field ubar(grid, 3);
            for (std::size_t p = 0; p < grid.npoints(); ++p)
                for (int a = 0; a < 3; ++a) ubar.at(p, a) = sc.ubar[a];
            u = initial_data::slice_four_velocity(ubar, geo.h);
            const auto slice = initial_data::complete_gauge_data(geo);
            return reduction::pack_state(slice.g, slice.dtg, w, u, sc.eos);
        }
        case Recipe::SoundWave: {
            initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
            for (std::size_t p = 0; p < grid.npoints(); ++p)
                for (int a = 0; a < 3; ++a) geo.h.at(p, sym3(a, a)) = 1.0;
            const double kappa = 2.0 * M_PI * sc.wave_k / grid.extent[0];
            const double kap = sc.eos.kappa(sc.w_background);
            for (std::size_t p = 0; p < grid.npoints(); ++p) {
                const double x = grid.point(p)[0];
                const double dw = sc.amplitude * std::sin(kappa * x);
                w.at(p, 0) = sc.w_background + dw;
                const double u1 = kap * dw;  // right-moving acoustic eigenvector
                u.at(p, 0) = std::sqrt(1.0 + u1 * u1);
                u.at(p, 1) = u1;
            }
            const auto slice = initial_data::complete_gauge_data(geo);
            return reduction::pack_state(slice.g, slice.dtg, w, u, sc.eos);
        }
    }
    throw Error("unreachable recipe");
}

namespace {

nlohmann::json scenario_json(const Scenario& sc) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["grid"] = {{"n", sc.grid.n},
                 {"extent", sc.grid.extent},
                 {"boundary",
                  sc.grid.boundary == BoundaryMode::Periodic ? "periodic" : "frozen-exterior"},
                 {"fd_order", sc.grid.fd_order}};
    j["eos"] = {{"K", sc.eos.K}, {"gamma", sc.eos.gamma}};
    j["norms"] = {{"s", sc.norms.s}, {"delta", sc.norms.delta}};
    j["warnings"] = sc.warnings;
    return j;
}

std::vector<std::pair<double, double>> monitor_series(
    const std::vector<evolve::MonitorRecord>& ms, double evolve::MonitorRecord::*field) {
    std::vector<std::pair<double, double>> out;
    for (const auto& m : ms) out.emplace_back(m.t, m.*field);
    return out;
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc, const RunOptions& opt) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.outdir);
    if (opt.threads > 0) set_thread_count(opt.threads);
    const std::string od = opt.outdir + "/";

    const int dim = sc.grid.dim();
    wsobolev::NormEngine engine(dim, sc.box_points > 0 ? sc.box_points : default_box_points(dim));

    const Field U0 = build_initial_state(sc);
    RunOutcome out;

    if (sc.evo.mode == evolve::Mode::Direct) {
        const auto res = evolve::run(U0, sc.eos, sc.evo, sc.norms, engine);
        out.monitors = res.monitors;
        write_binary(res.state, od + "state.f64");
        Field g, dtg, wf, uf;
        reduction::unpack_state(res.state, sc.eos, g, dtg, wf, uf);
        write_binary(g, od + "final_metric.f64");
        write_binary(dtg, od + "final_dtg.f64");
        Field fl(sc.grid, 5);
        for (std::size_t p = 0; p < fl.npoints(); ++p) {
            fl.at(p, 0) = wf.at(p, 0);
            for (int a = 0; a < 4; ++a) fl.at(p, 1 + a) = uf.at(p, a);
        }
        write_binary(fl, od + "final_fluid.f64");
        if (sc.grid.npoints() <= 4096) {
            write_csv(g, od + "final_metric.csv");
            write_csv(fl, od + "final_fluid.csv");
        }

        // profile slice along the first axis through the grid center
        std::vector<report::Series> prof(2);
        prof[0].first = "w";
        prof[1].first = "v_plus";
        for (int i = 0; i < sc.grid.n[0]; ++i) {
            const std::size_t p = sc.grid.index(i, sc.grid.n[1] / 2, sc.grid.n[2] / 2);
            const double x = sc.grid.coord(0, i);
            prof[0].second.emplace_back(x, wf.at(p, 0));
            prof[1].second.emplace_back(
                x, res.state.at(p, layout::v0 + sym4(2, 2)) -
                       res.state.at(p, layout::v0 + sym4(3, 3)));
        }
        report::write_svg_plot(od + "profile.svg", "final profiles", prof);
    } else {
        const double vmax = std::max(reduction::max_char_speed(U0, sc.eos), 1e-6);
        const double dt =
            sc.evo.dt > 0.0 ? sc.evo.dt : sc.evo.cfl * sc.grid.min_spacing() / vmax;
        const auto pr = evolve::picard_run(U0, sc.eos, sc.evo.t_end, dt, sc.evo.picard_iters,
                                           sc.norms.delta, sc.evo.u0_min);
        out.picard_ratios = pr.ratios;
        // monitors along the converged sweep
        const int every = std::max(1, sc.evo.monitor_every);
        for (std::size_t i = 0; i < pr.trajectory.states.size(); ++i) {
            if (i % std::size_t(every) != 0 && i + 1 != pr.trajectory.states.size()) continue;
            const Field& U = pr.trajectory.states[i];
            Field g, dtg, wf, uf;
            reduction::unpack_state(U, sc.eos, g, dtg, wf, uf);
            evolve::MonitorRecord m;
            m.t = pr.trajectory.dt * double(i);
            const int margin = evolve::interior_margin(sc.grid, m.t);
            m.norm_drift = fluid::normalization_drift(g, uf).max_abs_interior(margin);
            m.harmonic_residual =
                geometry::harmonic_residual(g, dtg).max_abs_interior(margin);
            m.a0_min_eig = reduction::min_A0_eigenvalue(U, sc.eos);
            double cons = 0.0;
            const Field& ef = pr.eps_trajectory[i];
            for (std::size_t p = 0; p < U.npoints(); ++p)
                cons = std::max(cons, std::abs(ef.at(p, 0) -
                                               std::pow(std::max(wf.at(p, 0), 0.0),
                                                        sc.eos.beta())));
            m.eps_consistency = cons;
            m.energy_x = wsobolev::energy_x_norm(
                U, sc.norms, wsobolev::weights_from_state(U, sc.eos), engine);
            out.monitors.push_back(m);
        }
        write_binary(pr.state, od + "state.f64");
        write_binary(pr.eps, od + "final_epsilon.f64");
    }

    report::write_monitors_csv(out.monitors, od + "monitors.csv");
    report::write_svg_plot(od + "energy.svg", "energy_x(t)",
                           {{"energy_x", monitor_series(out.monitors,
                                                        &evolve::MonitorRecord::energy_x)}});
    report::write_svg_plot(
        od + "residuals.svg", "residuals(t)",
        {{"norm_drift", monitor_series(out.monitors, &evolve::MonitorRecord::norm_drift)},
         {"harmonic", monitor_series(out.monitors, &evolve::MonitorRecord::harmonic_residual)},
         {"eps", monitor_series(out.monitors, &evolve::MonitorRecord::eps_consistency)}},
        true);

    // constraint residual report for fluid scenarios (slice data only)
    if (sc.recipe == Recipe::FluidBall) {
        Field g, dtg, wf, uf;
        reduction::unpack_state(U0, sc.eos, g, dtg, wf, uf);
        initial_data::GeometricData geo{Field(sc.grid, 6), Field(sc.grid, 6)};
        for (std::size_t p = 0; p < sc.grid.npoints(); ++p)
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b)
                    geo.h.at(p, sym3(a, b)) = g.at(p, sym4(a + 1, b + 1));
        Field ubar(sc.grid, 3);
        for (std::size_t p = 0; p < sc.grid.npoints(); ++p)
            for (int a = 0; a < 3; ++a) ubar.at(p, a) = uf.at(p, a + 1);
        const auto matter = initial_data::compatibility_map(wf, ubar, geo.h, sc.eos);
        const auto resid = initial_data::constraint_residuals(geo, matter);
        write_csv(resid.hamiltonian, od + "constraint_hamiltonian.csv");
        write_csv(resid.momentum, od + "constraint_momentum.csv");
    }

    write_norm_report(sc, od + "norms.csv");

    // checks
    std::vector<std::pair<double, double>> eseries;
    for (const auto& m : out.monitors) eseries.emplace_back(m.t, m.energy_x * m.energy_x);
    out.gronwall = evolve::gronwall_check(eseries);
    for (const auto& m : out.monitors) {
        if (m.a0_min_eig <= 0.0) {
            out.checks_pass = false;
            out.failures.push_back("A0 lost positivity at t = " + std::to_string(m.t));
            break;
        }
    }
    if (eseries.size() >= 10 && !out.gronwall.pass) {
        out.checks_pass = false;
        out.failures.push_back("no admissible energy growth constant");
    }

    nlohmann::json summary = scenario_json(sc);
    summary["seed"] = opt.seed;
    summary["steps"] = out.monitors.empty() ? 0 : int(out.monitors.size()) - 1;
    double max_drift = 0.0, max_f = 0.0, max_eps = 0.0, min_a0 = 1e300;
    for (const auto& m : out.monitors) {
        max_drift = std::max(max_drift, m.norm_drift);
        max_f = std::max(max_f, m.harmonic_residual);
        max_eps = std::max(max_eps, m.eps_consistency);
        min_a0 = std::min(min_a0, m.a0_min_eig);
    }
    summary["monitors"] = {{"max_norm_drift", max_drift},
                           {"max_harmonic_residual", max_f},
                           {"max_eps_consistency", max_eps},
                           {"min_a0_eigenvalue", min_a0},
                           {"final_energy_x",
                            out.monitors.empty() ? 0.0 : out.monitors.back().energy_x}};
    summary["gronwall"] = {{"c_bound", out.gronwall.c_bound},
                           {"c_ls", out.gronwall.c_ls},
                           {"slack", out.gronwall.slack},
                           {"pass", out.gronwall.pass}};
    if (!out.picard_ratios.empty()) summary["picard_ratios"] = out.picard_ratios;
    summary["pass"] = out.checks_pass;
    summary["failures"] = out.failures;
    std::ofstream(od + "summary.json") << summary.dump(2) << "\n";
    return out;
}

void write_norm_report(const Scenario& sc, const std::string& path) {
    const int dim = sc.grid.dim();
    wsobolev::NormEngine engine(dim, sc.box_points > 0 ? sc.box_points : default_box_points(dim));
    const Field U0 = build_initial_state(sc);
    const wsobolev::Sampler base = wsobolev::sampler_from_field(U0);

    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(12);
    out << "function,s,delta,gamma_psi,value,tail\n";
    struct Block {
        const char* id;
        int begin, count;
        double s, delta;
    };
    const double s = sc.norms.s, d = sc.norms.delta, gp = sc.norms.gamma_psi;
    const Block blocks[] = {{"v", layout::v0, 10, s, d},
                            {"dtv", layout::dtv0, 10, s, d + 1.0},
                            {"dxv", layout::dxv0, 30, s, d + 1.0},
                            {"W", layout::w0, 5, s + 1.0, d + 1.0}};
    for (const auto& b : blocks) {
        wsobolev::Sampler sub = base;
        sub.ncomp = b.count;
        auto eval = base.eval;
        const int begin = b.begin;
        sub.eval = [eval, begin](const std::array<double, 3>& x, int c) {
            return eval(x, begin + c);
        };
        const wsobolev::NormSpec spec{b.s, b.delta, gp};
        const auto terms = engine.shell_terms(sub, spec);
        double total = 0.0;
        for (double t : terms) total += t;
        out << b.id << "," << b.s << "," << b.delta << "," << gp << "," << std::sqrt(total)
            << "," << (total > 0.0 ? terms.back() / total : 0.0) << "\n";
    }
    out.close();
}

std::vector<ConvergenceRow> convergence_study(const Scenario& sc, int levels,
                                              const RunOptions& opt) {
    std::vector<ConvergenceRow> rows;
    for (int l = 0; l < levels; ++l) {
        Scenario s = sc;
        for (int a = 0; a < 3; ++a)
            if (sc.grid.active(a)) s.grid.n[a] = sc.grid.n[a] << l;
        s.evo.monitor_every = std::max(1, sc.evo.monitor_every << l);
        const int dim = s.grid.dim();
        wsobolev::NormEngine engine(dim,
                                    s.box_points > 0 ? s.box_points : default_box_points(dim));
        const Field U0 = build_initial_state(s);
        const auto res = evolve::run(U0, s.eos, s.evo, s.norms, engine);
        ConvergenceRow row;
        row.n = s.grid.n[0];
        for (const auto& m : res.monitors) {
            row.norm_drift = std::max(row.norm_drift, m.norm_drift);
            row.harmonic_residual = std::max(row.harmonic_residual, m.harmonic_residual);
        }
        if (!rows.empty()) {
            row.drift_order = std::log2(rows.back().norm_drift / row.norm_drift);
            row.fmu_order = std::log2(rows.back().harmonic_residual / row.harmonic_residual);
        }
        rows.push_back(row);
    }
    namespace fs = std::filesystem;
    fs::create_directories(opt.outdir);
    std::ofstream out(opt.outdir + "/convergence.csv");
    out.precision(12);
    out << "n,norm_drift,drift_order,harmonic_residual,fmu_order\n";
    for (const auto& r : rows)
        out << r.n << "," << r.norm_drift << "," << r.drift_order << "," << r.harmonic_residual
            << "," << r.fmu_order << "\n";
    return rows;
}

}  // namespace scenario
}  // namespace gravfluid
