#include "doctest.h"
#include "gravfluid/geometry.hpp"
#include "helpers.hpp"

using namespace gravfluid;
using namespace gftest;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("invert_metric of Minkowski is Minkowski") {
    const auto grid = grid_1d(8);
    const Field g = minkowski(grid);
    const Field gi = geometry::invert_metric(g);
    for (int c = 0; c < 10; ++c) CHECK(gi.at(0, c) == g.at(0, c));
}

TEST_CASE("invert_metric of a diagonal metric") {
    const auto grid = grid_1d(8);
    Field g = minkowski(grid);
    for (std::size_t p = 0; p < g.npoints(); ++p) g.at(p, sym4(1, 1)) = 4.0;
    const Field gi = geometry::invert_metric(g);
    CHECK(gi.at(3, sym4(0, 0)) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(gi.at(3, sym4(1, 1)) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(gi.at(3, sym4(2, 2)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invert_metric product is the identity to 1e-12") {
    const auto grid = grid_1d(16);
    const Field g = perturbed_metric(grid, 0.01, 7);
    const Field gi = geometry::invert_metric(g);
    for (std::size_t p = 0; p < g.npoints(); ++p)
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                double acc = 0.0;
                for (int b = 0; b < 4; ++b) acc += gi.at(p, sym4(a, b)) * g.at(p, sym4(b, c));
                CHECK(std::abs(acc - (a == c ? 1.0 : 0.0)) < 1e-12);
            }
}

TEST_CASE("invert_metric rejects singular metrics") {
    const auto grid = grid_1d(8);
    Field g = minkowski(grid);
    for (int c = 0; c < 10; ++c) g.at(2, c) = 0.0;
    CHECK_THROWS_AS(geometry::invert_metric(g), SingularMetric);
}

TEST_CASE("christoffel vanishes for constant metrics") {
    const auto grid = grid_1d(12);
    const Field g = perturbed_metric(grid, 0.0, 1);  // plain eta
    const Field dtg(grid, 10);
    const Field G = geometry::christoffel(g, dtg);
    CHECK(G.max_abs() == 0.0);
}

TEST_CASE("christoffel matches a'/a for g = diag(-1, a(x)^2, 1, 1)") {
    auto closed_form = [](double x) { return 0.1 * std::cos(x) / (1.0 + 0.1 * std::sin(x)); };
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128}) {
        const auto grid = grid_1d(n);
        const Field g = make_field(grid, 10, [](const std::array<double, 3>& x, int c) {
            const double a = 1.0 + 0.1 * std::sin(x[0]);
            if (c == 0) return -1.0;
            if (c == sym4(1, 1)) return a * a;
            if (c == sym4(2, 2) || c == sym4(3, 3)) return 1.0;
            return 0.0;
        });
        const Field dtg(grid, 10);
        const Field G = geometry::christoffel(g, dtg);
        double e = 0.0;
        for (std::size_t p = 0; p < grid.npoints(); ++p)
            e = std::max(e, std::abs(G.at(p, 1 * 10 + sym4(1, 1)) -
                                     closed_form(grid.point(p)[0])));
        err[idx++] = e;
    }
    CHECK(err[2] < 1e-6);
    const double order = fitted_order(err[0], err[1], err[2]);
    CHECK(order == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("christoffel converges at second order when configured") {
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128}) {
        const auto grid = grid_1d(n, 2.0 * M_PI, BoundaryMode::Periodic, 2);
        const Field g = make_field(grid, 10, [](const std::array<double, 3>& x, int c) {
            const double a = 1.0 + 0.1 * std::sin(x[0]);
            if (c == 0) return -1.0;
            if (c == sym4(1, 1)) return a * a;
            if (c == sym4(2, 2) || c == sym4(3, 3)) return 1.0;
            return 0.0;
        });
        const Field dtg(grid, 10);
        const Field G = geometry::christoffel(g, dtg);
        double e = 0.0;
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            const double x = grid.point(p)[0];
            const double cf = 0.1 * std::cos(x) / (1.0 + 0.1 * std::sin(x));
            e = std::max(e, std::abs(G.at(p, 10 + sym4(1, 1)) - cf));
        }
        err[idx++] = e;
    }
    CHECK(fitted_order(err[0], err[1], err[2]) == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("ricci_oracle vanishes on Minkowski") {
    const auto grid = grid_1d(16);
    const Field g = minkowski(grid);
    geometry::TimeDerivs td{Field(grid, 10), Field(grid, 10)};
    const Field R = geometry::ricci_oracle(g, td);
    CHECK(R.max_abs() == 0.0);
}

namespace {

/// Analytic gauge-wave metric data at fixed t = 0: g = eta + A sin(k(x-t)) T.
struct GaugeWave {
    double A, k;
    std::array<double, 10> T{};

    GaugeWave(double amp, double kk) : A(amp), k(kk) {
        T[sym4(2, 2)] = 1.0;
        T[sym4(3, 3)] = -1.0;
    }
    Field g(const GridSpec& grid) const {
        return make_field(grid, 10, [this](const std::array<double, 3>& x, int c) {
            const double eta = c == 0 ? -1.0 : (c == 4 || c == 7 || c == 9) ? 1.0 : 0.0;
            return eta + A * std::sin(k * x[0]) * T[std::size_t(c)];
        });
    }
    geometry::TimeDerivs td(const GridSpec& grid) const {
        return {make_field(grid, 10,
                           [this](const std::array<double, 3>& x, int c) {
                               return -A * k * std::cos(k * x[0]) * T[std::size_t(c)];
                           }),
                make_field(grid, 10, [this](const std::array<double, 3>& x, int c) {
                    return -A * k * k * std::sin(k * x[0]) * T[std::size_t(c)];
                })};
    }
};

}  // namespace

TEST_CASE("ricci_oracle on a weak gauge wave is O(A^2) plus discretization error") {
    const double A = 1e-3;
    const GaugeWave gw(A, 1.0);
    const auto grid = grid_1d(128);
    const Field R = geometry::ricci_oracle(gw.g(grid), gw.td(grid));
    // linearized vacuum: the O(A) part cancels, the rest is A^2-sized
    CHECK(R.max_abs() < 20.0 * A * A);
    CHECK(R.max_abs() > 0.0);
}

TEST_CASE("ricci_oracle self-converges at the scheme order") {
    const GaugeWave gw(0.05, 1.0);
    Field R32, R64, R128, R256;
    auto compute = [&](int n) {
        const auto grid = grid_1d(n);
        return geometry::ricci_oracle(gw.g(grid), gw.td(grid));
    };
    R32 = compute(32);
    R64 = compute(64);
    R128 = compute(128);
    R256 = compute(256);
    // compare on the shared coarse points
    auto diff = [&](const Field& coarse, const Field& fine) {
        double e = 0.0;
        const int ratio = fine.grid().n[0] / coarse.grid().n[0];
        for (int i = 0; i < coarse.grid().n[0]; ++i)
            for (int c = 0; c < 10; ++c)
                e = std::max(e, std::abs(coarse.at(coarse.grid().index(i, 0, 0), c) -
                                         fine.at(fine.grid().index(i * ratio, 0, 0), c)));
        return e;
    };
    const double e0 = diff(R32, R64), e1 = diff(R64, R128), e2 = diff(R128, R256);
    CHECK(fitted_order(e0, e1, e2) == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("lower_index on Minkowski") {
    const auto grid = grid_1d(8);
    const Field g = minkowski(grid);
    Field u(grid, 4);
    for (std::size_t p = 0; p < u.npoints(); ++p) {
        u.at(p, 0) = 2.0;
        u.at(p, 1) = 1.0;
    }
    const Field lo = geometry::lower_index(u, g);
    CHECK(lo.at(1, 0) == -2.0);
    CHECK(lo.at(1, 1) == 1.0);
    CHECK(lo.at(1, 2) == 0.0);
}

TEST_CASE("raise then lower is the identity to 1e-12") {
    const auto grid = grid_1d(16);
    const Field g = perturbed_metric(grid, 0.05, 11);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Field xi(grid, 4);
    for (std::size_t p = 0; p < xi.npoints(); ++p)
        for (int a = 0; a < 4; ++a) xi.at(p, a) = d(rng);
    const Field up = geometry::raise_index(xi, g);
    const Field back = geometry::lower_index(up, g);
    for (std::size_t p = 0; p < xi.npoints(); ++p)
        for (int a = 0; a < 4; ++a) CHECK(std::abs(back.at(p, a) - xi.at(p, a)) < 1e-12);
}

TEST_CASE("signature check accepts admissible metrics and rejects flipped ones") {
    const auto grid = grid_1d(8);
    CHECK_NOTHROW(geometry::check_signature(perturbed_metric(grid, 0.05, 5)));
    Field bad = minkowski(grid);
    for (std::size_t p = 0; p < bad.npoints(); ++p) bad.at(p, sym4(1, 1)) = -1.0;
    CHECK_THROWS(geometry::check_signature(bad));
}

TEST_CASE("harmonic residual vanishes for Minkowski") {
    const auto grid = grid_1d(8);
    const Field F = geometry::harmonic_residual(minkowski(grid), Field(grid, 10));
    CHECK(F.max_abs() == 0.0);
}

TEST_SUITE_END();
