#include "gravfluid/fluid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace gravfluid {
namespace fluid {

PointFluid PointFluid::make(const double g[10], const double gi[10], const double u[4],
                            double w, const EquationOfState& eos, double norm_tol) {
    if (w < 0.0) throw NegativeMakino();
    PointFluid f;
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
    if (u[0] <= 0.0) throw Error("past-directed four-velocity rejected (u^0 <= 0)");
    const double s2 = f.sigma() * f.sigma();
    if (s2 > 1.0 - kCausalityMargin) throw CausalityViolation(s2);
    if (norm_tol >= 0.0) {
        const double res = f.norm_residual();
        if (std::abs(res) > norm_tol) throw NotNormalized(res);
    }
    return f;
}

double PointFluid::norm_residual() const {
    double acc = 1.0;
    for (int a = 0; a < 4; ++a) acc += ulo[a] * u[a];
    return acc;
}

namespace {

std::array<Mat5, 4> matrices_impl(const PointFluid& f, bool scaled) {
    // scaled: conjugated by diag(1/kappa0, 1,..); kappa/kappa0 collapses to
    // the exact ratio 1/(1+K w^2) so the vacuum block is the identity bitwise
    const double kfac = scaled ? f.eos.kappa_ratio(f.w) : f.kappa();
    const double sk = f.sigma() * kfac;
    const double k2 = kfac * kfac;
    std::array<Mat5, 4> A;
    for (int nu = 0; nu < 4; ++nu) {
        auto& M = A[nu];
        M[0][0] = k2 * f.u[nu];
        for (int b = 0; b < 4; ++b) {
            const double off = sk * f.P(nu, b);
            M[0][1 + b] = off;
            M[1 + b][0] = off;
        }
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) {
                const double val = f.refl(a, b) * f.u[nu];
                M[1 + a][1 + b] = val;
                M[1 + b][1 + a] = val;
            }
    }
    return A;
}

std::array<double, 5> lower_order_impl(const PointFluid& f, const double G2[4][10],
                                       bool scaled) {
    // Gamma^b_{nu m} u^m contracted once more with u^nu or P^nu_b
    std::array<double, 5> l{};
    double Gu[4][4];  // [nu][b] = Gamma^b_{nu m} u^m
    for (int nu = 0; nu < 4; ++nu)
        for (int b = 0; b < 4; ++b) {
            double acc = 0.0;
            for (int m = 0; m < 4; ++m) acc += G2[b][sym4(nu, m)] * f.u[m];
            Gu[nu][b] = acc;
        }
    const double sk = f.sigma() * (scaled ? f.eos.kappa_ratio(f.w) : f.kappa());
    double acc0 = 0.0;
    for (int nu = 0; nu < 4; ++nu)
        for (int b = 0; b < 4; ++b) acc0 += f.P(nu, b) * Gu[nu][b];
    l[0] = sk * acc0;
    for (int a = 0; a < 4; ++a) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b)
            for (int nu = 0; nu < 4; ++nu) acc += f.refl(a, b) * f.u[nu] * Gu[nu][b];
        l[1 + a] = acc;
    }
    return l;
}

}  // namespace

std::array<Mat5, 4> fluid_matrices(const PointFluid& f) { return matrices_impl(f, false); }

std::array<Mat5, 4> fluid_matrices_scaled(const PointFluid& f) {
    return matrices_impl(f, true);
}

std::array<double, 5> lower_order(const PointFluid& f, const double G2[4][10]) {
    return lower_order_impl(f, G2, false);
}

std::array<double, 5> lower_order_scaled(const PointFluid& f, const double G2[4][10]) {
    return lower_order_impl(f, G2, true);
}

double characteristic_polynomial(const PointFluid& f, const double xi[4], double det_g) {
    double uxi = 0.0;
    for (int a = 0; a < 4; ++a) uxi += f.u[a] * xi[a];
    // P^a_b xi_a xi^b = g^{ab} xi_a xi_b + (u.xi)^2
    double xixi = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) xixi += f.gi[sym4(a, b)] * xi[a] * xi[b];
    const double Pxx = xixi + uxi * uxi;
    const double s2 = f.sigma() * f.sigma();
    const double k2 = f.kappa() * f.kappa();
    return -k2 * det_g * uxi * uxi * uxi * (uxi * uxi - s2 * Pxx);
}

TimelikeCheck check_timelike_covector(const PointFluid& f, const double xi[4]) {
    double uxi = 0.0;
    for (int a = 0; a < 4; ++a) uxi += f.u[a] * xi[a];
    double xixi = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) xixi += f.gi[sym4(a, b)] * xi[a] * xi[b];
    const double Pxx = xixi + uxi * uxi;
    const double margin = uxi * uxi - f.sigma() * f.sigma() * Pxx;
    return {margin > 0.0 && uxi != 0.0, margin};
}

std::array<double, 5> characteristic_speeds(const PointFluid& f, const double n[3]) {
    const auto A = fluid_matrices(f);
    Eigen::Matrix<double, 5, 5> A0, An;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            A0(i, j) = A[0][i][j];
            An(i, j) = n[0] * A[1][i][j] + n[1] * A[2][i][j] + n[2] * A[3][i][j];
        }
    Eigen::LLT<Eigen::Matrix<double, 5, 5>> llt(A0);
    if (llt.info() != Eigen::Success) throw NonHyperbolic("fluid A^0 not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> ges(An, A0);
    std::array<double, 5> out;
    for (int i = 0; i < 5; ++i) out[i] = ges.eigenvalues()[i];
    std::sort(out.begin(), out.end());
    return out;
}

std::array<double, 5> characteristic_speeds_roots(const PointFluid& f, const double n[3]) {
    // xi(lambda) = (-lambda, n). Material root: u.xi = 0. Sound roots:
    // (1 - s^2)(u.xi)^2 = s^2 g^{ab} xi_a xi_b.
    const double un = f.u[1] * n[0] + f.u[2] * n[1] + f.u[3] * n[2];
    const double material = un / f.u[0];
    const double s2 = f.sigma() * f.sigma();

    // quadratic a2 lambda^2 + a1 lambda + a0 from expanding both sides
    const double g00 = f.gi[sym4(0, 0)];
    double g0n = 0.0, gnn = 0.0;
    for (int a = 0; a < 3; ++a) {
        g0n += f.gi[sym4(0, a + 1)] * n[a];
        for (int b = 0; b < 3; ++b) gnn += f.gi[sym4(a + 1, b + 1)] * n[a] * n[b];
    }
    const double c1 = 1.0 - s2;
    const double a2 = c1 * f.u[0] * f.u[0] - s2 * g00;
    const double a1 = -2.0 * c1 * f.u[0] * un + 2.0 * s2 * g0n;
    const double a0 = c1 * un * un - s2 * gnn;
    const double disc = std::sqrt(std::max(0.0, a1 * a1 - 4.0 * a2 * a0));
    std::array<double, 5> out{material, material, material, (-a1 - disc) / (2.0 * a2),
                              (-a1 + disc) / (2.0 * a2)};
    std::sort(out.begin(), out.end());
    return out;
}

Field normalization_drift(const Field& g, const Field& u) {
    Field out(g.grid(), 1);
    for (std::size_t p = 0; p < g.npoints(); ++p) {
        double acc = 1.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) acc += g.at(p, sym4(a, b)) * u.at(p, a) * u.at(p, b);
        out.at(p, 0) = acc;
    }
    return out;
}

}  // namespace fluid
}  // namespace gravfluid
