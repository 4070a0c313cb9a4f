#include "gravfluid/reduction.hpp"

#include <cmath>

#include "gravfluid/geometry.hpp"

namespace gravfluid {
namespace reduction {

namespace {
constexpr double kPi = 3.14159265358979323846;

inline double eta_comp(int s) { return s == 0 ? -1.0 : (s == 4 || s == 7 || s == 9) ? 1.0 : 0.0; }

/// 3x3 wave block a33 (one sym4 component slice): m * g^{ab}.
inline Eigen::Matrix3d a33_block(const PointState& ps) {
    Eigen::Matrix3d M;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M(a, b) = ps.m * ps.gi[sym4(a + 1, b + 1)];
    return M;
}

inline Eigen::Matrix<double, 5, 5> a44_block(const PointState& ps) {
    const auto A = fluid::fluid_matrices_scaled(ps.fluid_view());
    Eigen::Matrix<double, 5, 5> M;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) M(i, j) = A[0][i][j];
    return M;
}

/// Christoffels of the second kind from the state's own first derivatives.
inline void state_christoffel(const PointState& ps, double G2[4][10]) {
    double G1[4][10];
    geometry::point::christoffel_first(ps.h, G1);
    geometry::point::christoffel_second(ps.gi, G1, G2);
}

}  // namespace

fluid::PointFluid PointState::fluid_view() const {
    fluid::PointFluid f;
    f.eos = eos;
    f.w = w;
    for (int s = 0; s < 10; ++s) {
        f.g[s] = g[s];
        f.gi[s] = gi[s];
    }
    for (int a = 0; a < 4; ++a) f.u[a] = u[a];
    for (int a = 0; a < 4; ++a) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) acc += g[sym4(a, b)] * u[b];
        f.ulo[a] = acc;
    }
    return f;
}

PointState decode(const double* U, const EquationOfState& eos, std::size_t point_index) {
    PointState ps;
    ps.eos = eos;
    for (int s = 0; s < 10; ++s) ps.g[s] = eta_comp(s) + U[layout::v0 + s];
    ps.det_g = geometry::point::invert(ps.g, ps.gi);
    if (std::abs(ps.det_g) <= 1e-14) throw SingularMetric(point_index);
    if (std::abs(ps.gi[sym4(0, 0)]) < 1e-10) throw SingularLapse(point_index);
    ps.m = 1.0 / (-ps.gi[sym4(0, 0)]);
    for (int s = 0; s < 10; ++s) {
        ps.h[0][s] = U[layout::dtv0 + s];
        for (int a = 0; a < 3; ++a) ps.h[1 + a][s] = U[layout::dxv(a, s)];
    }
    ps.w = U[layout::w0] / eos.kappa0();
    ps.u[0] = 1.0 + U[layout::w0 + 1];
    for (int a = 1; a < 4; ++a) ps.u[a] = U[layout::w0 + 1 + a];
    return ps;
}

void source_f(const PointState& ps, double f[10]) {
    const double eps = std::pow(std::max(ps.w, 0.0), ps.eos.beta());
    const double kw2 = ps.eos.K * ps.w * ps.w;
    double ulo[4];
    for (int a = 0; a < 4; ++a) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) acc += ps.g[sym4(a, b)] * ps.u[b];
        ulo[a] = acc;
    }
    const double pref = ps.m * 8.0 * kPi * eps;
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b)
            f[sym4(a, b)] =
                pref * ((1.0 - kw2) * ps.g[sym4(a, b)] + 2.0 * (1.0 + kw2) * ulo[a] * ulo[b]);
}

void quadratic_H(const PointState& ps, double H[10]) {
    geometry::point::quadratic_remainder(ps.gi, ps.h, H);
}

namespace {

/// Right side of the system at one point. DU[a] holds the spatial derivative
/// of all 55 components along axis a. When `normalized` is false the dtv and
/// dxv rows come out without the 1/(-g^00) factor (the (2.3)-form rows).
void rhs_point(const PointState& ps, const std::array<const double*, 3>& DU, double* rhs,
               bool normalized) {
    const double mfac = normalized ? ps.m : 1.0;

    // v rows: d_t v = dtv
    for (int s = 0; s < 10; ++s) rhs[layout::v0 + s] = ps.h[0][s];

    // dtv rows: m { 2 g^{0a} d_a dtv + g^{ab} d_a dxv_b - H } + f
    double H[10], f[10];
    quadratic_H(ps, H);
    source_f(ps, f);
    for (int s = 0; s < 10; ++s) {
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
            acc += 2.0 * ps.gi[sym4(0, a + 1)] * DU[a][layout::dtv0 + s];
            for (int b = 0; b < 3; ++b)
                acc += ps.gi[sym4(a + 1, b + 1)] * DU[a][layout::dxv(b, s)];
        }
        rhs[layout::dtv0 + s] = mfac * (acc - H[s]) + (normalized ? f[s] : f[s] / ps.m);
    }

    // dxv rows: m g^{ba} d_a dtv
    for (int b = 0; b < 3; ++b)
        for (int s = 0; s < 10; ++s) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                acc += ps.gi[sym4(b + 1, a + 1)] * DU[a][layout::dtv0 + s];
            rhs[layout::dxv(b, s)] = mfac * acc;
        }

    // W rows: -Atilde^a d_a W - l
    const auto fl = ps.fluid_view();
    const auto A = fluid::fluid_matrices_scaled(fl);
    double G2[4][10];
    state_christoffel(ps, G2);
    const auto l = fluid::lower_order_scaled(fl, G2);
    for (int i = 0; i < 5; ++i) {
        double acc = -l[i];
        for (int a = 0; a < 3; ++a)
            for (int j = 0; j < 5; ++j) acc -= A[1 + a][i][j] * DU[a][layout::w0 + j];
        rhs[layout::w0 + i] = acc;
    }
}

void solve_point(const PointState& ps, double* rhs, std::size_t p, bool freeze_metric) {
    if (freeze_metric) {
        for (int c = 0; c < layout::w0; ++c) rhs[c] = 0.0;
    } else {
        const Eigen::Matrix3d M3 = a33_block(ps);
        Eigen::LLT<Eigen::Matrix3d> llt3(M3);
        if (llt3.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M3, Eigen::EigenvaluesOnly);
            throw IndefiniteA0(es.eigenvalues()[0], p);
        }
        for (int s = 0; s < 10; ++s) {
            Eigen::Vector3d y(rhs[layout::dxv(0, s)], rhs[layout::dxv(1, s)],
                              rhs[layout::dxv(2, s)]);
            const Eigen::Vector3d x = llt3.solve(y);
            for (int b = 0; b < 3; ++b) rhs[layout::dxv(b, s)] = x[b];
        }
    }
    const Eigen::Matrix<double, 5, 5> M5 = a44_block(ps);
    Eigen::LLT<Eigen::Matrix<double, 5, 5>> llt5(M5);
    if (llt5.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(M5,
                                                                      Eigen::EigenvaluesOnly);
        throw IndefiniteA0(es.eigenvalues()[0], p);
    }
    Eigen::Matrix<double, 5, 1> y;
    for (int i = 0; i < 5; ++i) y[i] = rhs[layout::w0 + i];
    const auto x = llt5.solve(y);
    for (int i = 0; i < 5; ++i) rhs[layout::w0 + i] = x[i];
}

Field rhs_field(const Field& U, const EquationOfState& eos, bool normalized) {
    Field out(U.grid(), layout::nU);
    parallel_for(U.npoints(), [&](std::size_t b, std::size_t e) {
        std::array<std::vector<double>, 3> d;
        for (auto& v : d) v.resize(layout::nU);
        for (std::size_t p = b; p < e; ++p) {
            if (!U.grid().evolves(p)) continue;  // frozen-exterior layers stay put
            for (int a = 0; a < 3; ++a) U.deriv_all(p, a, d[a].data());
            const PointState ps = decode(U.point(p), eos, p);
            rhs_point(ps, {d[0].data(), d[1].data(), d[2].data()}, out.point(p), normalized);
        }
    });
    return out;
}

}  // namespace

Field assemble_rhs(const Field& U, const EquationOfState& eos) {
    return rhs_field(U, eos, true);
}

Field assemble_rhs_unscaled_route(const Field& U, const EquationOfState& eos) {
    Field out = rhs_field(U, eos, false);
    parallel_for(U.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const PointState ps = decode(U.point(p), eos, p);
            double* r = out.point(p);
            for (int s = 0; s < 10; ++s) {
                r[layout::dtv0 + s] *= ps.m;
                for (int a = 0; a < 3; ++a) r[layout::dxv(a, s)] *= ps.m;
            }
        }
    });
    return out;
}

void apply_A0_inverse(const Field& U, const EquationOfState& eos, Field& rhs,
                      bool freeze_metric) {
    parallel_for(U.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            if (!U.grid().evolves(p)) continue;
            const PointState ps = decode(U.point(p), eos, p);
            solve_point(ps, rhs.point(p), p, freeze_metric);
        }
    });
}

Field evolution_rhs(const Field& U, const EquationOfState& eos, bool freeze_metric) {
    Field out(U.grid(), layout::nU);
    parallel_for(U.npoints(), [&](std::size_t b, std::size_t e) {
        std::array<std::vector<double>, 3> d;
        for (auto& v : d) v.resize(layout::nU);
        for (std::size_t p = b; p < e; ++p) {
            if (!U.grid().evolves(p)) continue;
            for (int a = 0; a < 3; ++a) U.deriv_all(p, a, d[a].data());
            const PointState ps = decode(U.point(p), eos, p);
            rhs_point(ps, {d[0].data(), d[1].data(), d[2].data()}, out.point(p), true);
            solve_point(ps, out.point(p), p, freeze_metric);
        }
    });
    return out;
}

double min_A0_eigenvalue(const Field& U, const EquationOfState& eos) {
    double global = 1.0;  // identity blocks
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        const PointState ps = decode(U.point(p), eos, p);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> e3(a33_block(ps), Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> e5(a44_block(ps),
                                                                      Eigen::EigenvaluesOnly);
        global = std::min({global, e3.eigenvalues()[0], e5.eigenvalues()[0]});
    }
    return global;
}

double max_char_speed(const Field& U, const EquationOfState& eos) {
    double vmax = 0.0;
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        const PointState ps = decode(U.point(p), eos, p);
        const auto fl = ps.fluid_view();
        for (int a = 0; a < 3; ++a) {
            if (!U.grid().active(a)) continue;
            // null cone along axis a: g^{00} l^2 - 2 g^{0a} l + g^{aa} = 0
            const double q = ps.gi[sym4(0, 0)];
            const double r = ps.gi[sym4(0, a + 1)];
            const double s = ps.gi[sym4(a + 1, a + 1)];
            const double disc = std::sqrt(std::max(0.0, r * r - q * s));
            vmax = std::max({vmax, std::abs((r + disc) / q), std::abs((r - disc) / q)});
            double n[3] = {0.0, 0.0, 0.0};
            n[a] = 1.0;
            for (double lam : fluid::characteristic_speeds_roots(fl, n))
                vmax = std::max(vmax, std::abs(lam));
        }
    }
    return vmax;
}

Field pack_state(const Field& g, const Field& dtg, const Field& w, const Field& u,
                 const EquationOfState& eos) {
    Field U(g.grid(), layout::nU);
    const double k0 = eos.kappa0();
    for (std::size_t p = 0; p < g.npoints(); ++p) {
        double* up = U.point(p);
        for (int s = 0; s < 10; ++s) {
            up[layout::v0 + s] = g.at(p, s) - eta_comp(s);
            up[layout::dtv0 + s] = dtg.at(p, s);
        }
        up[layout::w0] = k0 * w.at(p, 0);
        up[layout::w0 + 1] = u.at(p, 0) - 1.0;
        for (int a = 1; a < 4; ++a) up[layout::w0 + 1 + a] = u.at(p, a);
    }
    // first-order reduction: dxv is the finite difference of v
    for (std::size_t p = 0; p < g.npoints(); ++p)
        for (int a = 0; a < 3; ++a)
            for (int s = 0; s < 10; ++s)
                U.at(p, layout::dxv(a, s)) = g.deriv(p, s, a);
    return U;
}

void unpack_state(const Field& U, const EquationOfState& eos, Field& g, Field& dtg, Field& w,
                  Field& u) {
    g = Field(U.grid(), 10);
    dtg = Field(U.grid(), 10);
    w = Field(U.grid(), 1);
    u = Field(U.grid(), 4);
    const double k0 = eos.kappa0();
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        for (int s = 0; s < 10; ++s) {
            g.at(p, s) = eta_comp(s) + U.at(p, layout::v0 + s);
            dtg.at(p, s) = U.at(p, layout::dtv0 + s);
        }
        w.at(p, 0) = U.at(p, layout::w0) / k0;
        u.at(p, 0) = 1.0 + U.at(p, layout::w0 + 1);
        for (int a = 1; a < 4; ++a) u.at(p, a) = U.at(p, layout::w0 + 1 + a);
    }
}

Field quadratic_terms(const Field& g, const Field& dtg) {
    const Field gi = geometry::invert_metric(g);
    Field out(g.grid(), 10);
    parallel_for(g.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            std::array<std::array<double, 10>, 4> dg;
            for (int s = 0; s < 10; ++s) dg[0][s] = dtg.at(p, s);
            for (int a = 0; a < 3; ++a) g.deriv_all(p, a, dg[1 + a].data());
            geometry::point::quadratic_remainder(gi.point(p), dg, out.point(p));
        }
    });
    return out;
}

Field source_field(const Field& U, const EquationOfState& eos) {
    Field out(U.grid(), 10);
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        const PointState ps = decode(U.point(p), eos, p);
        source_f(ps, out.point(p));
    }
    return out;
}

Field reduction_residual(const Field& U) {
    Field out(U.grid(), 30);
    for (std::size_t p = 0; p < U.npoints(); ++p)
        for (int a = 0; a < 3; ++a)
            for (int s = 0; s < 10; ++s)
                out.at(p, 10 * a + s) =
                    U.at(p, layout::dxv(a, s)) - U.deriv(p, layout::v0 + s, a);
    return out;
}

Eigen::MatrixXd assemble_A0_point(const double* U, const EquationOfState& eos) {
    const PointState ps = decode(U, eos);
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(55, 55);
    for (int i = 0; i < 20; ++i) A0(i, i) = 1.0;
    const Eigen::Matrix3d M3 = a33_block(ps);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int s = 0; s < 10; ++s)
                A0(layout::dxv(a, s), layout::dxv(b, s)) = M3(a, b);
    const auto M5 = a44_block(ps);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) A0(layout::w0 + i, layout::w0 + j) = M5(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> e3(M3, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> e5(M5, Eigen::EigenvaluesOnly);
    const double min_eig = std::min({1.0, e3.eigenvalues()[0], e5.eigenvalues()[0]});
    if (min_eig <= 0.0) throw IndefiniteA0(min_eig, 0);
    return A0;
}

std::array<Eigen::MatrixXd, 3> constant_Ca() {
    std::array<Eigen::MatrixXd, 3> C;
    for (int ax = 0; ax < 3; ++ax) {
        C[ax] = Eigen::MatrixXd::Zero(55, 55);
        for (int s = 0; s < 10; ++s) {
            C[ax](layout::dtv0 + s, layout::dxv(ax, s)) = 1.0;
            C[ax](layout::dxv(ax, s), layout::dtv0 + s) = 1.0;
        }
    }
    return C;
}

std::array<Eigen::MatrixXd, 3> assemble_Aa_point(const double* U, const EquationOfState& eos) {
    const PointState ps = decode(U, eos);
    const auto Afl = fluid::fluid_matrices_scaled(ps.fluid_view());
    std::array<Eigen::MatrixXd, 3> A;
    for (int ax = 0; ax < 3; ++ax) {
        A[ax] = Eigen::MatrixXd::Zero(55, 55);
        for (int s = 0; s < 10; ++s) {
            A[ax](layout::dtv0 + s, layout::dtv0 + s) = ps.m * 2.0 * ps.gi[sym4(0, ax + 1)];
            for (int b = 0; b < 3; ++b) {
                const double val =
                    ps.m * ps.gi[sym4(ax + 1, b + 1)] - (ax == b ? 1.0 : 0.0);
                A[ax](layout::dtv0 + s, layout::dxv(b, s)) = val;
                A[ax](layout::dxv(b, s), layout::dtv0 + s) = val;
            }
        }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                A[ax](layout::w0 + i, layout::w0 + j) = -Afl[1 + ax][i][j];
    }
    return A;
}

BlockSystem assemble_point(const double* U, const EquationOfState& eos) {
    BlockSystem bs;
    bs.A0 = assemble_A0_point(U, eos);
    bs.Aa = assemble_Aa_point(U, eos);
    bs.Ca = constant_Ca();
    bs.B = Eigen::MatrixXd::Zero(55, 50);
    bs.F = Eigen::VectorXd::Zero(55);

    const PointState ps = decode(U, eos);
    for (int s = 0; s < 10; ++s) bs.B(layout::v0 + s, 10 + s) = 1.0;

    // b2 blocks: -m * (bilinear polarization of H against unit h-columns)
    const auto fl = ps.fluid_view();
    for (int col = 0; col < 40; ++col) {
        std::array<std::array<double, 10>, 4> e{};
        e[col / 10][col % 10] = 1.0;
        double J[10];
        geometry::point::quadratic_remainder_bilinear(ps.gi, ps.h, e, J);
        for (int s = 0; s < 10; ++s) bs.B(layout::dtv0 + s, 10 + col) = -ps.m * J[s];

        // b4 blocks: the lower-order fluid vector is linear in h
        double G1[4][10], G2[4][10];
        geometry::point::christoffel_first(e, G1);
        geometry::point::christoffel_second(ps.gi, G1, G2);
        const auto L = fluid::lower_order_scaled(fl, G2);
        for (int i = 0; i < 5; ++i) bs.B(layout::w0 + i, 10 + col) = -L[i];
    }

    double f[10];
    source_f(ps, f);
    for (int s = 0; s < 10; ++s) bs.F(layout::dtv0 + s) = f[s];
    return bs;
}

}  // namespace reduction
}  // namespace gravfluid
