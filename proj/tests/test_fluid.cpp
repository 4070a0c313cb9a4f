#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "gravfluid/fluid.hpp"
#include "gravfluid/geometry.hpp"
#include "helpers.hpp"

using namespace gravfluid;
using namespace gftest;

TEST_SUITE_BEGIN("fluid");

namespace {

constexpr double kEta[10] = {-1, 0, 0, 0, 1, 0, 0, 1, 0, 1};

fluid::PointFluid rest_state(double w, const EquationOfState& eos) {
    const double u[4] = {1, 0, 0, 0};
    return fluid::PointFluid::make(kEta, kEta, u, w, eos);
}

struct RandomState {
    double g[10], gi[10], u[4], w;
};

RandomState random_admissible(std::mt19937_64& rng, const EquationOfState& eos) {
    std::uniform_real_distribution<double> dv(-0.1, 0.1), dw(0.0, 0.6);
    RandomState s;
    for (int c = 0; c < 10; ++c) s.g[c] = kEta[c] + dv(rng);
    geometry::point::invert(s.g, s.gi);
    random_velocity(s.g, rng, 0.4, s.u);
    s.w = dw(rng);
    while (eos.sound_speed(s.w) * eos.sound_speed(s.w) > 0.99) s.w *= 0.5;
    return s;
}

}  // namespace

TEST_CASE("makino_forward basic values and round trip") {
    EquationOfState eos53(1.0, 5.0 / 3.0);
    CHECK(makino_forward(0.0, eos53) == 0.0);
    CHECK(makino_forward(8.0, eos53) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(makino_forward(-1.0, eos53), NegativeDensity);

    EquationOfState eos2(1.0, 2.0);
    for (double eps : {0.0, 0.3, 1.0, 4.4, 10.0})
        CHECK(std::abs(makino_inverse(makino_forward(eps, eos2), eos2) - eps) < 1e-12);
}

TEST_CASE("makino_inverse hand values") {
    CHECK(makino_inverse(0.0, EquationOfState(1.0, 2.0)) == 0.0);
    CHECK(makino_inverse(3.0, EquationOfState(1.0, 2.0)) == doctest::Approx(9.0));
    CHECK(makino_inverse(4.0, EquationOfState(1.0, 3.0)) == doctest::Approx(4.0));
    CHECK_THROWS_AS(makino_inverse(-0.5, EquationOfState(1.0, 2.0)), NegativeMakino);
}

TEST_CASE("sound speed and kappa factor") {
    EquationOfState eos(1.0, 2.0);
    CHECK(sound_speed(0.0, eos) == 0.0);
    CHECK(kappa_factor(0.0, eos) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sound_speed(0.5, eos) == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-12));
    CHECK(std::pow(sound_speed(0.5, eos), 2) == doctest::Approx(0.5));
}

TEST_CASE("M' = sigma / ((eps+p) kappa) against finite differences") {
    for (double gamma : {1.8, 2.0, 2.5}) {
        EquationOfState eos(0.7, gamma);
        for (double eps : {0.5, 1.0, 2.0, 5.0}) {
            const double h = 3e-6 * eps;
            const double fd =
                (makino_forward(eps + h, eos) - makino_forward(eps - h, eos)) / (2.0 * h);
            const double w = makino_forward(eps, eos);
            const double p = eos.pressure(eps);
            const double closed = eos.sound_speed(w) / ((eps + p) * eos.kappa(w));
            CHECK(std::abs(fd - closed) / closed < 1e-6);
        }
    }
}

TEST_CASE("projection and reflection at the rest state") {
    EquationOfState eos(1.0, 2.0);
    const auto f = rest_state(0.3, eos);
    // P mixed = diag(0,1,1,1), reflection (lower) = diag(1,1,1,1)
    for (int nu = 0; nu < 4; ++nu)
        for (int al = 0; al < 4; ++al) {
            CHECK(f.P(nu, al) == doctest::Approx(nu == al && nu > 0 ? 1.0 : 0.0));
            CHECK(f.refl(nu, al) == doctest::Approx(nu == al ? 1.0 : 0.0));
        }
}

TEST_CASE("projection/reflection algebra on random admissible states") {
    std::mt19937_64 rng(42);
    EquationOfState eos(1.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_admissible(rng, eos);
        const auto f = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
        // P u = 0
        for (int nu = 0; nu < 4; ++nu) {
            double Pu = 0.0;
            for (int al = 0; al < 4; ++al) Pu += f.P(nu, al) * f.u[al];
            CHECK(std::abs(Pu) < 1e-12);
        }
        // Gamma o Gamma = id
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int gq = 0; gq < 4; ++gq) acc += f.refl_up(a, gq) * f.refl(gq, b);
                CHECK(std::abs(acc - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
        // Gamma^{ag} P_g^nu = P^{a nu}
        for (int a = 0; a < 4; ++a)
            for (int nu = 0; nu < 4; ++nu) {
                double lhs = 0.0;
                for (int gq = 0; gq < 4; ++gq) lhs += f.refl_up(a, gq) * f.P(nu, gq);
                const double rhs = f.gi[sym4(a, nu)] + f.u[a] * f.u[nu];
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        // P o P = P
        for (int nu = 0; nu < 4; ++nu)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int al = 0; al < 4; ++al) acc += f.P(nu, al) * f.P(al, b);
                CHECK(std::abs(acc - f.P(nu, b)) < 1e-12);
            }
    }
}

TEST_CASE("fluid matrices at the vacuum rest state") {
    EquationOfState eos(1.0, 2.0);
    const auto f = rest_state(0.0, eos);
    const auto A = fluid::fluid_matrices(f);
    const double k0 = eos.kappa0();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double expect = i != j ? 0.0 : (i == 0 ? k0 * k0 : 1.0);
            CHECK(A[0][i][j] == doctest::Approx(expect));
        }
    // the kappa0-normalized block is exactly the identity there
    const auto As = fluid::fluid_matrices_scaled(f);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(As[0][i][j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("fluid matrices are exactly symmetric over 1000 random states") {
    std::mt19937_64 rng(7);
    EquationOfState eos(0.8, 1.9);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_admissible(rng, eos);
        const auto f = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
        for (const auto& A : fluid::fluid_matrices(f))
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) CHECK(A[i][j] == A[j][i]);
        for (const auto& A : fluid::fluid_matrices_scaled(f))
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) CHECK(A[i][j] == A[j][i]);
    }
}

TEST_CASE("-u_nu A^nu = diag(kappa^2, reflection) and is positive definite") {
    std::mt19937_64 rng(19);
    EquationOfState eos(1.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_admissible(rng, eos);
        const auto f = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
        const auto A = fluid::fluid_matrices(f);
        Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
        for (int nu = 0; nu < 4; ++nu)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) M(i, j) += -f.ulo[nu] * A[nu][i][j];
        CHECK(std::abs(M(0, 0) - f.kappa() * f.kappa()) < 1e-12);
        for (int i = 1; i < 5; ++i) {
            CHECK(std::abs(M(0, i)) < 1e-12);
            for (int j = 1; j < 5; ++j) CHECK(std::abs(M(i, j) - f.refl(i - 1, j - 1)) < 1e-12);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(M);
        CHECK(es.eigenvalues()[0] > 0.0);
    }
}

TEST_CASE("characteristic polynomial closed-form values") {
    EquationOfState eos(1.0, 2.0);
    const double w = 0.5 / std::sqrt(2.0);  // sigma = 0.5
    const auto f = rest_state(w, eos);
    CHECK(f.sigma() == doctest::Approx(0.5));
    const double det_eta = -1.0;

    const double xi1[4] = {0, 1, 0, 0};  // material characteristic
    CHECK(fluid::characteristic_polynomial(f, xi1, det_eta) == doctest::Approx(0.0));

    const double xi2[4] = {0.5, 1, 0, 0};  // sound cone covector
    CHECK(std::abs(fluid::characteristic_polynomial(f, xi2, det_eta)) < 1e-14);

    const double xi3[4] = {1, 0, 0, 0};  // -u_lo
    CHECK(fluid::characteristic_polynomial(f, xi3, det_eta) ==
          doctest::Approx(f.kappa() * f.kappa()));
}

TEST_CASE("closed-form determinant matches LU factorization") {
    std::mt19937_64 rng(23);
    EquationOfState eos(1.0, 2.0);
    std::uniform_real_distribution<double> dxi(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_admissible(rng, eos);
        const auto f = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
        double xi[4];
        for (auto& v : xi) v = dxi(rng);
        const auto A = fluid::fluid_matrices(f);
        Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
        for (int nu = 0; nu < 4; ++nu)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) M(i, j) += xi[nu] * A[nu][i][j];
        Eigen::Matrix4d G;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) G(a, b) = s.g[sym4(a, b)];
        const double lu = Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>>(M).determinant();
        const double q = fluid::characteristic_polynomial(f, xi, G.determinant());
        CHECK(std::abs(lu - q) / std::max(1.0, std::abs(q)) < 1e-8);
    }
}

TEST_CASE("timelike covector check") {
    EquationOfState eos(1.0, 2.0);

    // sigma^2 = 0.5 state: hand value of (u^0)^2 (1-sigma^2) - sigma^2 g^00
    const auto f = rest_state(0.5, eos);
    const double xi_t[4] = {1, 0, 0, 0};
    const auto rt = fluid::check_timelike_covector(f, xi_t);
    CHECK(rt.timelike);
    CHECK(rt.margin == doctest::Approx(1.0 * 0.5 - 0.5 * (-1.0)));

    // xi = -u_lo gives margin 1 for any normalized state
    std::mt19937_64 rng(5);
    const auto s = random_admissible(rng, eos);
    const auto fr = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
    double xiu[4];
    for (int a = 0; a < 4; ++a) xiu[a] = -fr.ulo[a];
    const auto ru = fluid::check_timelike_covector(fr, xiu);
    CHECK(ru.timelike);
    CHECK(ru.margin == doctest::Approx(1.0).epsilon(1e-8));

    const double xi_s[4] = {0, 1, 0, 0};
    CHECK_FALSE(fluid::check_timelike_covector(f, xi_s).timelike);
}

TEST_CASE("characteristic speeds of the rest fluid are {0,0,0,+-sigma}") {
    EquationOfState eos(1.0, 2.0);
    const auto f = rest_state(0.5, eos);  // sigma^2 = 0.5
    const double sigma = f.sigma();
    const double n[3] = {1, 0, 0};
    const auto sp = fluid::characteristic_speeds(f, n);
    CHECK(std::abs(sp[0] + sigma) < 1e-8);
    CHECK(std::abs(sp[1]) < 1e-8);
    CHECK(std::abs(sp[2]) < 1e-8);
    CHECK(std::abs(sp[3]) < 1e-8);
    CHECK(std::abs(sp[4] - sigma) < 1e-8);
}

TEST_CASE("characteristic speeds vanish at w = 0") {
    EquationOfState eos(1.0, 2.0);
    const auto f = rest_state(0.0, eos);
    const double n[3] = {0, 1, 0};
    for (double v : fluid::characteristic_speeds(f, n)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("boosted speeds match the closed-form cone roots") {
    std::mt19937_64 rng(31);
    EquationOfState eos(1.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = random_admissible(rng, eos);
        const auto f = fluid::PointFluid::make(s.g, s.gi, s.u, s.w, eos, 1e-8);
        const double n[3] = {1, 0, 0};
        const auto eig = fluid::characteristic_speeds(f, n);
        const auto roots = fluid::characteristic_speeds_roots(f, n);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(eig[i] - roots[i]) < 1e-8);
    }
}

TEST_CASE("normalization drift") {
    const auto grid = grid_1d(8);
    Field g = minkowski(grid);
    Field u(grid, 4);
    for (std::size_t p = 0; p < u.npoints(); ++p) u.at(p, 0) = 1.0;
    CHECK(fluid::normalization_drift(g, u).max_abs() < 1e-12);

    for (std::size_t p = 0; p < g.npoints(); ++p) g.at(p, sym4(0, 0)) = -1.01;
    const Field drift = fluid::normalization_drift(g, u);
    CHECK(drift.at(0, 0) == doctest::Approx(-0.01));
}

TEST_CASE("matrix entries stay bounded as w -> 0 (Makino regularization)") {
    EquationOfState eos(1.0, 2.0);
    double u[4] = {0, 0.1, -0.05, 0.02};
    u[0] = std::sqrt(1.0 + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);

    auto entries_at = [&](double w) {
        const auto f = fluid::PointFluid::make(kEta, kEta, u, w, eos, 1e-8);
        std::vector<double> e;
        for (const auto& A : fluid::fluid_matrices(f))
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) e.push_back(A[i][j]);
        return e;
    };
    const auto base = entries_at(0.0);
    double prev_dev = 1e300;
    for (int k = 1; k <= 12; ++k) {
        const auto e = entries_at(std::pow(10.0, -k));
        double dev = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) dev = std::max(dev, std::abs(e[i] - base[i]));
        CHECK(dev <= prev_dev * (1.0 + 1e-12));  // no blow-up on the way down
        prev_dev = dev;
        if (k == 12) CHECK(dev < 1e-6);
    }
}

TEST_CASE("past-directed four-velocities are rejected") {
    EquationOfState eos(1.0, 2.0);
    const double u[4] = {-1, 0, 0, 0};
    CHECK_THROWS(fluid::PointFluid::make(kEta, kEta, u, 0.1, eos));
}

TEST_CASE("causality gate rejects sigma^2 >= 1") {
    EquationOfState eos(1.0, 2.0);
    const double u[4] = {1, 0, 0, 0};
    CHECK_THROWS_AS(fluid::PointFluid::make(kEta, kEta, u, 0.72, eos), CausalityViolation);
}

TEST_SUITE_END();
