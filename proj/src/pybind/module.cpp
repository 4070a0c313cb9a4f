#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gravfluid/evolve.hpp"
#include "gravfluid/fluid.hpp"
#include "gravfluid/geometry.hpp"
#include "gravfluid/initial_data.hpp"
#include "gravfluid/reduction.hpp"
#include "gravfluid/scenario.hpp"
#include "gravfluid/wsobolev.hpp"

namespace py = pybind11;
using namespace gravfluid;

namespace {

GridSpec grid_from_args(const std::array<int, 3>& n, const std::array<double, 3>& extent,
                        const std::string& boundary, int fd_order) {
    GridSpec g;
    g.n = n;
    g.extent = extent;
    g.boundary = boundary == "periodic" ? BoundaryMode::Periodic : BoundaryMode::FrozenExterior;
    g.fd_order = fd_order;
    g.validate();
    return g;
}

Field field_from_array(const py::array_t<double, py::array::c_style>& arr, const GridSpec& grid) {
    if (arr.ndim() != 4) throw ValidationError("array", "expected shape (nx, ny, nz, ncomp)");
    for (int a = 0; a < 3; ++a)
        if (arr.shape(a) != grid.n[a])
            throw ValidationError("array", "shape does not match the grid");
    Field f(grid, int(arr.shape(3)));
    std::copy(arr.data(), arr.data() + arr.size(), f.data().begin());
    return f;
}

py::array_t<double> array_from_field(const Field& f) {
    const auto& g = f.grid();
    py::array_t<double> arr({g.n[0], g.n[1], g.n[2], f.ncomp()});
    std::copy(f.data().begin(), f.data().end(), arr.mutable_data());
    return arr;
}

fluid::PointFluid point_fluid(const py::array_t<double>& g4, const py::array_t<double>& u4,
                              double w, const EquationOfState& eos) {
    if (g4.size() != 16 || u4.size() != 4)
        throw ValidationError("g,u", "expected a 4x4 metric and a 4-velocity");
    double g[10], gi[10], u[4];
    auto gv = g4.unchecked<2>();
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) g[sym4(a, b)] = gv(a, b);
    geometry::point::invert(g, gi);
    auto uv = u4.unchecked<1>();
    for (int a = 0; a < 4; ++a) u[a] = uv(a);
    return fluid::PointFluid::make(g, gi, u, w, eos);
}

}  // namespace

PYBIND11_MODULE(_gravfluid, m) {
    m.doc() = "symmetric-hyperbolic evolution of a self-gravitating perfect fluid "
              "in harmonic gauge, with weighted fractional Sobolev norm machinery";

    // translators run newest-first, so the base goes in before the derived
    py::register_exception<Error>(m, "GravfluidError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ScenarioParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ScenarioValidationError", PyExc_ValueError);

    py::class_<EquationOfState>(m, "EquationOfState")
        .def(py::init<double, double>(), py::arg("K") = 1.0, py::arg("gamma") = 2.0)
        .def_readonly("K", &EquationOfState::K)
        .def_readonly("gamma", &EquationOfState::gamma)
        .def_property_readonly("beta", &EquationOfState::beta)
        .def("pressure", &EquationOfState::pressure)
        .def("sound_speed", &EquationOfState::sound_speed)
        .def("kappa", &EquationOfState::kappa)
        .def("kappa0", &EquationOfState::kappa0);

    m.def("makino_forward", &makino_forward, py::arg("epsilon"), py::arg("eos"),
          "w = epsilon^((gamma-1)/2)");
    m.def("makino_inverse", &makino_inverse, py::arg("w"), py::arg("eos"),
          "epsilon = w^(2/(gamma-1))");

    m.def(
        "fluid_matrices",
        [](const py::array_t<double>& g4, const py::array_t<double>& u4, double w,
           const EquationOfState& eos) {
            const auto f = point_fluid(g4, u4, w, eos);
            const auto A = fluid::fluid_matrices(f);
            py::array_t<double> out({4, 5, 5});
            auto o = out.mutable_unchecked<3>();
            for (int nu = 0; nu < 4; ++nu)
                for (int i = 0; i < 5; ++i)
                    for (int j = 0; j < 5; ++j) o(nu, i, j) = A[nu][i][j];
            return out;
        },
        py::arg("g"), py::arg("u"), py::arg("w"), py::arg("eos"),
        "the four 5x5 symmetric coefficient matrices of the fluid system");

    m.def(
        "characteristic_speeds",
        [](const py::array_t<double>& g4, const py::array_t<double>& u4, double w,
           const EquationOfState& eos, const std::array<double, 3>& n) {
            const auto f = point_fluid(g4, u4, w, eos);
            const double nn[3] = {n[0], n[1], n[2]};
            return fluid::characteristic_speeds(f, nn);
        },
        py::arg("g"), py::arg("u"), py::arg("w"), py::arg("eos"), py::arg("n"));

    m.def(
        "characteristic_polynomial",
        [](const py::array_t<double>& g4, const py::array_t<double>& u4, double w,
           const EquationOfState& eos, const std::array<double, 4>& xi) {
            const auto f = point_fluid(g4, u4, w, eos);
            double g[10], gi[10];
            auto gv = g4.unchecked<2>();
            for (int a = 0; a < 4; ++a)
                for (int b = a; b < 4; ++b) g[sym4(a, b)] = gv(a, b);
            const double det = geometry::point::invert(g, gi);
            const double x[4] = {xi[0], xi[1], xi[2], xi[3]};
            return fluid::characteristic_polynomial(f, x, det);
        },
        py::arg("g"), py::arg("u"), py::arg("w"), py::arg("eos"), py::arg("xi"));

    m.def(
        "assemble_point",
        [](const py::array_t<double>& U, const EquationOfState& eos) {
            if (U.size() != layout::nU)
                throw ValidationError("U", "expected a 55-component state vector");
            const auto bs = reduction::assemble_point(U.data(), eos);
            py::dict out;
            auto mat = [](const Eigen::MatrixXd& M) {
                py::array_t<double> a({int(M.rows()), int(M.cols())});
                auto v = a.mutable_unchecked<2>();
                for (int i = 0; i < M.rows(); ++i)
                    for (int j = 0; j < M.cols(); ++j) v(i, j) = M(i, j);
                return a;
            };
            out["A0"] = mat(bs.A0);
            out["A1"] = mat(bs.Aa[0]);
            out["A2"] = mat(bs.Aa[1]);
            out["A3"] = mat(bs.Aa[2]);
            out["C1"] = mat(bs.Ca[0]);
            out["C2"] = mat(bs.Ca[1]);
            out["C3"] = mat(bs.Ca[2]);
            out["B"] = mat(bs.B);
            py::array_t<double> F(55);
            for (int i = 0; i < 55; ++i) F.mutable_at(i) = bs.F(i);
            out["F"] = F;
            return out;
        },
        py::arg("U"), py::arg("eos"),
        "materialize A0, Aa, Ca, B, F of the coupled system at one state");

    m.def(
        "complete_gauge_data",
        [](const py::array_t<double, py::array::c_style>& h,
           const py::array_t<double, py::array::c_style>& K, const std::array<int, 3>& n,
           const std::array<double, 3>& extent, const std::string& boundary, int fd_order) {
            const GridSpec grid = grid_from_args(n, extent, boundary, fd_order);
            initial_data::GeometricData geo{field_from_array(h, grid),
                                            field_from_array(K, grid)};
            const auto slice = initial_data::complete_gauge_data(geo);
            return py::make_tuple(array_from_field(slice.g), array_from_field(slice.dtg));
        },
        py::arg("h"), py::arg("K"), py::arg("n"), py::arg("extent"),
        py::arg("boundary") = "periodic", py::arg("fd_order") = 4,
        "harmonic-gauge completion of slice data (h, K) -> (g, dt g)");

    m.def(
        "constraint_residuals",
        [](const py::array_t<double, py::array::c_style>& h,
           const py::array_t<double, py::array::c_style>& K,
           const py::array_t<double, py::array::c_style>& z,
           const py::array_t<double, py::array::c_style>& j, const std::array<int, 3>& n,
           const std::array<double, 3>& extent, const std::string& boundary, int fd_order) {
            const GridSpec grid = grid_from_args(n, extent, boundary, fd_order);
            initial_data::GeometricData geo{field_from_array(h, grid),
                                            field_from_array(K, grid)};
            initial_data::MatterData matter{field_from_array(z, grid),
                                            field_from_array(j, grid)};
            const auto res = initial_data::constraint_residuals(geo, matter);
            return py::make_tuple(array_from_field(res.hamiltonian),
                                  array_from_field(res.momentum));
        },
        py::arg("h"), py::arg("K"), py::arg("z"), py::arg("j"), py::arg("n"),
        py::arg("extent"), py::arg("boundary") = "periodic", py::arg("fd_order") = 4);

    m.def(
        "norm_hs_delta",
        [](const py::array_t<double, py::array::c_style>& u, const std::array<int, 3>& n,
           const std::array<double, 3>& extent, double s, double delta, double gamma_psi,
           int box_points) {
            const GridSpec grid = grid_from_args(n, extent, "periodic", 4);
            const Field f = field_from_array(u, grid);
            const int dim = grid.dim();
            wsobolev::NormEngine engine(
                dim, box_points > 0 ? box_points : scenario::default_box_points(dim));
            return engine.norm_hs_delta(wsobolev::sampler_from_field(f),
                                        {s, delta, gamma_psi});
        },
        py::arg("u"), py::arg("n"), py::arg("extent"), py::arg("s"), py::arg("delta"),
        py::arg("gamma_psi") = 1.0, py::arg("box_points") = 0,
        "weighted fractional Sobolev norm of a grid field");

    m.def(
        "bessel_potential",
        [](const py::array_t<double, py::array::c_style>& u, const std::array<int, 3>& n,
           const std::array<double, 3>& extent, double s) {
            const GridSpec grid = grid_from_args(n, extent, "periodic", 4);
            return array_from_field(wsobolev::bessel_potential(field_from_array(u, grid), s));
        },
        py::arg("u"), py::arg("n"), py::arg("extent"), py::arg("s"));

    m.def(
        "parse_scenario",
        [](const std::string& text, bool strict_window) {
            const auto sc = scenario::parse_scenario(text, strict_window);
            py::dict out;
            out["name"] = sc.name;
            out["n"] = sc.grid.n;
            out["gamma"] = sc.eos.gamma;
            out["K"] = sc.eos.K;
            out["s"] = sc.norms.s;
            out["delta"] = sc.norms.delta;
            out["warnings"] = sc.warnings;
            return out;
        },
        py::arg("text"), py::arg("strict_window") = false);

    m.def(
        "run_scenario",
        [](const std::string& text, const std::string& outdir, int threads) {
            const auto sc = scenario::parse_scenario(text);
            scenario::RunOptions opt;
            opt.outdir = outdir;
            opt.threads = threads;
            const auto outcome = scenario::run_scenario(sc, opt);
            py::dict out;
            out["pass"] = outcome.checks_pass;
            out["failures"] = outcome.failures;
            out["gronwall_c"] = outcome.gronwall.c_bound;
            out["picard_ratios"] = outcome.picard_ratios;
            py::list monitors;
            for (const auto& mrec : outcome.monitors) {
                py::dict row;
                row["t"] = mrec.t;
                row["energy_x"] = mrec.energy_x;
                row["norm_drift"] = mrec.norm_drift;
                row["harmonic_residual"] = mrec.harmonic_residual;
                row["eps_consistency"] = mrec.eps_consistency;
                row["a0_min_eig"] = mrec.a0_min_eig;
                monitors.append(row);
            }
            out["monitors"] = monitors;
            return out;
        },
        py::arg("text"), py::arg("outdir"), py::arg("threads") = 0,
        "evolve a scenario and write its report files; returns the monitor series");

    m.def("regularity_window", [](const EquationOfState& eos) {
        return scenario::regularity_window(eos);
    });

    m.attr("__version__") = "0.1.0";
}
