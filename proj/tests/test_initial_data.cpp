#include <random>

#include "doctest.h"
#include "gravfluid/geometry.hpp"
#include "gravfluid/initial_data.hpp"
#include "gravfluid/wsobolev.hpp"
#include "helpers.hpp"

using namespace gravfluid;
using namespace gftest;

TEST_SUITE_BEGIN("initial_data");

namespace {

initial_data::GeometricData flat_slice(const GridSpec& grid) {
    initial_data::GeometricData geo{Field(grid, 6), Field(grid, 6)};
    for (std::size_t p = 0; p < grid.npoints(); ++p)
        for (int a = 0; a < 3; ++a) geo.h.at(p, sym3(a, a)) = 1.0;
    return geo;
}

}  // namespace

TEST_CASE("completion of flat data is static") {
    const auto grid = grid_1d(16);
    const auto slice = initial_data::complete_gauge_data(flat_slice(grid));
    CHECK(slice.dtg.max_abs() == 0.0);
    CHECK(slice.g.at(3, sym4(0, 0)) == -1.0);
    CHECK(slice.g.at(3, sym4(1, 1)) == 1.0);
}

TEST_CASE("completion hand values for h = delta, K = 0.1 delta") {
    const auto grid = grid_1d(16);
    auto geo = flat_slice(grid);
    for (std::size_t p = 0; p < grid.npoints(); ++p)
        for (int a = 0; a < 3; ++a) geo.K.at(p, sym3(a, a)) = 0.1;
    const auto slice = initial_data::complete_gauge_data(geo);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        CHECK(slice.dtg.at(p, sym4(0, 0)) == doctest::Approx(0.6).epsilon(1e-14));
        for (int c = 0; c < 3; ++c) CHECK(slice.dtg.at(p, sym4(0, c + 1)) == 0.0);
        for (int a = 0; a < 3; ++a)
            CHECK(slice.dtg.at(p, sym4(a + 1, a + 1)) == doctest::Approx(-0.2).epsilon(1e-14));
    }
}

TEST_CASE("completion rejects non-positive-definite slices") {
    const auto grid = grid_1d(8);
    auto geo = flat_slice(grid);
    geo.h.at(3, sym3(0, 0)) = -2.0;
    CHECK_THROWS_AS(initial_data::complete_gauge_data(geo), NotPositiveDefinite);
}

namespace {

initial_data::GeometricData wavy_slice(const GridSpec& grid) {
    // h with off-diagonal structure and d_1 h_22 != 0
    auto geo = flat_slice(grid);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const double x = grid.point(p)[0];
        geo.h.at(p, sym3(1, 1)) = 1.0 + 0.12 * std::sin(x);
        geo.h.at(p, sym3(0, 1)) = 0.05 * std::cos(x);
        geo.h.at(p, sym3(2, 2)) = 1.0 + 0.07 * std::cos(2.0 * x);
        geo.K.at(p, sym3(0, 0)) = 0.04 * std::sin(x);
        geo.K.at(p, sym3(1, 2)) = 0.03 * std::cos(x);
    }
    return geo;
}

}  // namespace

TEST_CASE("slice residual F^mu vanishes to roundoff with matched operators") {
    const auto grid = grid_1d(64);
    const auto slice = initial_data::complete_gauge_data(wavy_slice(grid));
    const Field F = geometry::harmonic_residual(slice.g, slice.dtg);
    CHECK(F.max_abs() < 1e-13);
}

TEST_CASE("slice residual converges at the completion's scheme order") {
    // complete at 2nd order, evaluate the residual with 4th-order operators:
    // the measured decay is the completion's order
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128}) {
        const auto grid2 = grid_1d(n, 2.0 * M_PI, BoundaryMode::Periodic, 2);
        const auto slice = initial_data::complete_gauge_data(wavy_slice(grid2));
        GridSpec grid4 = grid2;
        grid4.fd_order = 4;
        Field g(grid4, 10), dtg(grid4, 10);
        g.data() = slice.g.data();
        dtg.data() = slice.dtg.data();
        err[idx++] = geometry::harmonic_residual(g, dtg).max_abs();
    }
    CHECK(fitted_order(err[0], err[1], err[2]) == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("flat vacuum satisfies the constraints exactly") {
    const auto grid = grid_1d(16);
    initial_data::MatterData matter{Field(grid, 1), Field(grid, 3)};
    const auto res = initial_data::constraint_residuals(flat_slice(grid), matter);
    CHECK(res.hamiltonian.max_abs() == 0.0);
    CHECK(res.momentum.max_abs() == 0.0);
}

TEST_CASE("Hamiltonian residual hand value for constant K = k delta") {
    const double k = 0.07;
    const auto grid = grid_1d(16);
    auto geo = flat_slice(grid);
    for (std::size_t p = 0; p < grid.npoints(); ++p)
        for (int a = 0; a < 3; ++a) geo.K.at(p, sym3(a, a)) = k;
    initial_data::MatterData matter{Field(grid, 1), Field(grid, 3)};
    const auto res = initial_data::constraint_residuals(geo, matter);
    for (std::size_t p = 0; p < grid.npoints(); ++p)
        CHECK(res.hamiltonian.at(p, 0) == doctest::Approx(6.0 * k * k).epsilon(1e-12));
}

TEST_CASE("constraint residuals are linear in (z, j) with coefficients (-16pi, +8pi)") {
    const auto grid = grid_1d(32);
    const auto geo = wavy_slice(grid);
    initial_data::MatterData m0{Field(grid, 1), Field(grid, 3)};
    initial_data::MatterData m1{Field(grid, 1), Field(grid, 3)};
    const double dz = 0.37, dj = 0.21;
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        m1.z.at(p, 0) = dz;
        m1.j.at(p, 1) = dj;
    }
    const auto r0 = initial_data::constraint_residuals(geo, m0);
    const auto r1 = initial_data::constraint_residuals(geo, m1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        CHECK(r1.hamiltonian.at(p, 0) - r0.hamiltonian.at(p, 0) ==
              doctest::Approx(-16.0 * M_PI * dz).epsilon(1e-12));
        CHECK(r1.momentum.at(p, 1) - r0.momentum.at(p, 1) ==
              doctest::Approx(8.0 * M_PI * dj).epsilon(1e-12));
        CHECK(r1.momentum.at(p, 0) == doctest::Approx(r0.momentum.at(p, 0)));
    }
}

TEST_CASE("3d scalar curvature matches the closed form -2 a''/a") {
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128}) {
        const auto grid = grid_1d(n);
        Field h(grid, 6);
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            const double a = 1.0 + 0.1 * std::sin(grid.point(p)[0]);
            h.at(p, sym3(0, 0)) = 1.0;
            h.at(p, sym3(1, 1)) = a * a;
            h.at(p, sym3(2, 2)) = 1.0;
        }
        const Field R = initial_data::scalar_curvature3(h);
        double e = 0.0;
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            const double x = grid.point(p)[0];
            const double a = 1.0 + 0.1 * std::sin(x);
            const double app = -0.1 * std::sin(x);
            e = std::max(e, std::abs(R.at(p, 0) - (-2.0 * app / a)));
        }
        err[idx++] = e;
    }
    CHECK(fitted_order(err[0], err[1], err[2]) == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("compatibility map basics") {
    EquationOfState eos(1.0, 2.0);
    const auto grid = grid_1d(8);
    const auto geo = flat_slice(grid);
    Field w(grid, 1), ubar(grid, 3);

    SUBCASE("w = 0 gives vacuum sources") {
        const auto m = initial_data::compatibility_map(w, ubar, geo.h, eos);
        CHECK(m.z.max_abs() == 0.0);
        CHECK(m.j.max_abs() == 0.0);
    }

    SUBCASE("comoving fluid keeps z = w^beta") {
        for (std::size_t p = 0; p < grid.npoints(); ++p) w.at(p, 0) = 0.5;
        const auto m = initial_data::compatibility_map(w, ubar, geo.h, eos);
        CHECK(m.z.at(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(m.j.max_abs() == 0.0);
        // the printed reading loses the rest-energy term at ubar = 0
        const auto mp = initial_data::compatibility_map(w, ubar, geo.h, eos, true);
        CHECK(mp.z.max_abs() == 0.0);
    }

    SUBCASE("hand value of j for w = 1, ubar = (0.3, 0, 0)") {
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            w.at(p, 0) = 1.0;
            ubar.at(p, 0) = 0.3;
        }
        const auto m = initial_data::compatibility_map(w, ubar, geo.h, eos);
        CHECK(m.j.at(0, 0) == doctest::Approx(1.0 * 2.0 * 0.3 * std::sqrt(1.09)).epsilon(1e-14));
        CHECK(m.j.at(0, 0) == doctest::Approx(0.6264).epsilon(1e-3));
    }

    SUBCASE("j is odd and z is even in ubar") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> d(-0.4, 0.4);
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            w.at(p, 0) = 0.3;
            for (int a = 0; a < 3; ++a) ubar.at(p, a) = d(rng);
        }
        Field nbar(grid, 3);
        for (std::size_t p = 0; p < grid.npoints(); ++p)
            for (int a = 0; a < 3; ++a) nbar.at(p, a) = -ubar.at(p, a);
        const auto m1 = initial_data::compatibility_map(w, ubar, geo.h, eos);
        const auto m2 = initial_data::compatibility_map(w, nbar, geo.h, eos);
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            CHECK(m1.z.at(p, 0) == m2.z.at(p, 0));
            for (int a = 0; a < 3; ++a) CHECK(m1.j.at(p, a) == -m2.j.at(p, a));
        }
    }
}

TEST_CASE("slice four-velocity is normalized") {
    const auto grid = grid_1d(8);
    const auto geo = flat_slice(grid);
    Field ubar(grid, 3);
    for (std::size_t p = 0; p < grid.npoints(); ++p) ubar.at(p, 0) = 0.3;
    const Field u = initial_data::slice_four_velocity(ubar, geo.h);
    CHECK(u.at(0, 0) == doctest::Approx(std::sqrt(1.09)).epsilon(1e-14));
}

TEST_CASE("regularization of the zero field is rho times the cutoff") {
    const auto grid = grid_1d(256, 8.0);
    const Field zero(grid, 1);
    const Field out = initial_data::regularize_initial(zero, 0.01, 2.0);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const double r = std::abs(grid.point(p)[0]);
        if (r <= 2.0) CHECK(out.at(p, 0) == doctest::Approx(0.01).epsilon(1e-14));
        if (r >= 3.0) CHECK(out.at(p, 0) == 0.0);
        CHECK(out.at(p, 0) >= 0.0);
        CHECK(out.at(p, 0) <= 0.01 * (1.0 + 1e-12));
    }
}

TEST_CASE("regularization keeps a positive floor inside |x| <= M") {
    const auto grid = grid_1d(512, 8.0);
    Field w0(grid, 1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const double x = grid.point(p)[0];
        const double d = 1.0 - x * x;
        w0.at(p, 0) = d > 0.0 ? 0.4 * d * d : 0.0;
    }
    const double rho = 5e-3;
    const Field out = initial_data::regularize_initial(w0, rho, 2.0);
    for (std::size_t p = 0; p < grid.npoints(); ++p)
        if (std::abs(grid.point(p)[0]) <= 2.0) CHECK(out.at(p, 0) >= rho * (1.0 - 1e-12));
}

TEST_CASE("regularized data converges to the bump in the weighted norm") {
    const auto grid = grid_1d(1024, 8.0);
    Field w0(grid, 1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const double x = grid.point(p)[0];
        const double q = x * x;
        w0.at(p, 0) = q < 1.0 ? 0.2 * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    }
    const wsobolev::NormEngine engine(1, 1024);
    const wsobolev::NormSpec spec{0.5, 0.5, 1.0};
    const double width = 2.0 * grid.spacing(0);

    double prev = 1e300;
    double final_dist = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double rho = std::pow(10.0, -k);
        const Field wr = initial_data::regularize_initial(w0, rho, 2.0, width);
        Field diff = wr;
        for (std::size_t p = 0; p < grid.npoints(); ++p) diff.at(p, 0) -= w0.at(p, 0);
        const double dist = engine.norm_hs_delta(wsobolev::sampler_from_field(diff), spec);
        CHECK(dist < prev * (1.0 + 1e-9));
        prev = dist;
        final_dist = dist;
    }
    CHECK(final_dist < 1e-3);
}

TEST_SUITE_END();
