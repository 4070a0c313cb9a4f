#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gravfluid/reduction.hpp"
#include "gravfluid/scenario.hpp"
#include "gravfluid/wsobolev.hpp"

namespace gf = gravfluid;

namespace {

// 0 ok, 2 parse, 3 validation, 4 numerical abort, 5 check failure
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitCheck = 5;

struct GlobalOpts {
    std::string outdir = "out";
    int threads = 0;
    unsigned seed = 0;
    bool strict_window = false;
};

gf::scenario::Scenario load(const std::string& path, const GlobalOpts& g) {
    auto sc = gf::scenario::load_scenario(path, g.strict_window);
    for (const auto& w : sc.warnings) std::cerr << w << "\n";
    return sc;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << m(i, j) << (j + 1 == m.cols() ? "" : ",");
        out << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-gravitating relativistic fluid evolution in harmonic gauge"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.outdir, "output directory");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--seed", g.seed, "seed for randomized checks");
    app.add_flag("--strict-window", g.strict_window,
                 "treat the regularity-window warning as an error");

    std::string scn_path;
    int levels = 3;
    std::string point = "0,0,0";

    auto* run_cmd = app.add_subcommand("run", "evolve a scenario and write reports");
    run_cmd->add_option("scenario", scn_path, "scenario file")->required();

    auto* norms_cmd = app.add_subcommand("check-norms", "norm report for the initial data");
    norms_cmd->add_option("scenario", scn_path, "scenario file")->required();

    auto* conv_cmd = app.add_subcommand("convergence", "refinement study");
    conv_cmd->add_option("scenario", scn_path, "scenario file")->required();
    conv_cmd->add_option("--levels", levels, "refinement levels")->default_val(3);

    auto* mat_cmd = app.add_subcommand("matrices", "dump assembled blocks at a grid point");
    mat_cmd->add_option("scenario", scn_path, "scenario file")->required();
    mat_cmd->add_option("--point", point, "grid point i,j,k")->default_val("0,0,0");

    auto* ineq_cmd = app.add_subcommand("inequalities", "run the norm-calculus check suite");
    ineq_cmd->add_option("scenario", scn_path, "scenario file (equation of state source)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (g.threads > 0) gf::set_thread_count(g.threads);
        std::filesystem::create_directories(g.outdir);
        gf::scenario::RunOptions opt;
        opt.outdir = g.outdir;
        opt.threads = g.threads;
        opt.seed = g.seed;

        if (run_cmd->parsed()) {
            const auto sc = load(scn_path, g);
            const auto outcome = gf::scenario::run_scenario(sc, opt);
            for (const auto& f : outcome.failures) std::cerr << "CHECK FAILED: " << f << "\n";
            std::cout << (outcome.checks_pass ? "PASS" : "FAIL") << " " << sc.name << " ("
                      << outcome.monitors.size() << " monitor samples)\n";
            return outcome.checks_pass ? 0 : kExitCheck;
        }
        if (norms_cmd->parsed()) {
            const auto sc = load(scn_path, g);
            gf::scenario::write_norm_report(sc, g.outdir + "/norms.csv");
            std::cout << "norm report written to " << g.outdir << "/norms.csv\n";
            return 0;
        }
        if (conv_cmd->parsed()) {
            const auto sc = load(scn_path, g);
            const auto rows = gf::scenario::convergence_study(sc, levels, opt);
            std::cout << "n        drift          order   F_residual     order\n";
            for (const auto& r : rows)
                std::cout << r.n << "  " << r.norm_drift << "  " << r.drift_order << "  "
                          << r.harmonic_residual << "  " << r.fmu_order << "\n";
            return 0;
        }
        if (mat_cmd->parsed()) {
            const auto sc = load(scn_path, g);
            int i = 0, j = 0, k = 0;
            if (std::sscanf(point.c_str(), "%d,%d,%d", &i, &j, &k) != 3)
                throw gf::ValidationError("--point", "expected i,j,k");
            const gf::Field U = gf::scenario::build_initial_state(sc);
            const auto bs =
                gf::reduction::assemble_point(U.point(sc.grid.index(i, j, k)), sc.eos);
            write_matrix_csv(bs.A0, g.outdir + "/A0.csv");
            for (int a = 0; a < 3; ++a) {
                write_matrix_csv(bs.Aa[a], g.outdir + "/A" + std::to_string(a + 1) + ".csv");
                write_matrix_csv(bs.Ca[a], g.outdir + "/C" + std::to_string(a + 1) + ".csv");
            }
            write_matrix_csv(bs.B, g.outdir + "/B.csv");
            write_matrix_csv(bs.F, g.outdir + "/F.csv");
            std::cout << "blocks written to " << g.outdir << "\n";
            return 0;
        }
        if (ineq_cmd->parsed()) {
            gf::EquationOfState eos;
            if (!scn_path.empty()) eos = load(scn_path, g).eos;
            const auto rep = gf::wsobolev::check_inequality_suite(eos);
            gf::wsobolev::write_suite_csv(rep, g.outdir + "/inequalities.csv");
            for (const auto& f : rep.failures) std::cerr << "CHECK FAILED: " << f << "\n";
            std::cout << (rep.pass ? "PASS" : "FAIL") << " (" << rep.rows.size()
                      << " measurements, report in " << g.outdir << "/inequalities.csv)\n";
            return rep.pass ? 0 : kExitCheck;
        }
    } catch (const gf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const gf::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const gf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
