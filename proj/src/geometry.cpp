#include "gravfluid/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gravfluid {
namespace geometry {
namespace point {

namespace {
inline Eigen::Matrix4d unpack(const double g[10]) {
    Eigen::Matrix4d m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = g[sym4(a, b)];
    return m;
}
}  // namespace

double invert(const double g[10], double gi[10]) {
    const Eigen::Matrix4d m = unpack(g);
    const double det = m.determinant();
    if (std::abs(det) <= 1e-14) return det;
    const Eigen::Matrix4d inv = m.inverse();
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) gi[sym4(a, b)] = inv(a, b);
    return det;
}

void christoffel_first(const std::array<std::array<double, 10>, 4>& dg, double G1[4][10]) {
    for (int e = 0; e < 4; ++e)
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b)
                G1[e][sym4(a, b)] =
                    0.5 * (dg[a][sym4(e, b)] + dg[b][sym4(e, a)] - dg[e][sym4(a, b)]);
}

void christoffel_second(const double gi[10], const double G1[4][10], double G2[4][10]) {
    for (int m = 0; m < 4; ++m)
        for (int s = 0; s < 10; ++s) {
            double acc = 0.0;
            for (int e = 0; e < 4; ++e) acc += gi[sym4(m, e)] * G1[e][s];
            G2[m][s] = acc;
        }
}

void gauge_functional(const double gi[10], const double G2[4][10], double F[4]) {
    for (int m = 0; m < 4; ++m) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) acc += gi[sym4(b, c)] * G2[m][sym4(b, c)];
        F[m] = acc;
    }
}

namespace {

// Shared core of the quadratic remainder. With dgA == dgB it reduces to the
// quadratic form; mixed arguments give the polarized bilinear form used by
// the B-matrix factorization.
void remainder_core(const double gi[10],
                    const std::array<std::array<double, 10>, 4>& dgA,
                    const std::array<std::array<double, 10>, 4>& dgB,
                    double H[10]) {
    // d_c g^{mn} for each argument
    double dgiA[4][10], dgiB[4][10];
    for (int c = 0; c < 4; ++c)
        for (int m = 0; m < 4; ++m)
            for (int n = m; n < 4; ++n) {
                double a = 0.0, b = 0.0;
                for (int r = 0; r < 4; ++r)
                    for (int s = 0; s < 4; ++s) {
                        const double w = gi[sym4(m, r)] * gi[sym4(n, s)];
                        a -= w * dgA[c][sym4(r, s)];
                        b -= w * dgB[c][sym4(r, s)];
                    }
                dgiA[c][sym4(m, n)] = a;
                dgiB[c][sym4(m, n)] = b;
            }

    double G1A[4][10], G1B[4][10], G2A[4][10], G2B[4][10];
    christoffel_first(dgA, G1A);
    christoffel_first(dgB, G1B);
    christoffel_second(gi, G1A, G2A);
    christoffel_second(gi, G1B, G2B);

    // traces Gamma^m_{m nu} and divergences d_m g^{m e}
    double trA[4] = {}, trB[4] = {}, divA[4] = {}, divB[4] = {};
    for (int nu = 0; nu < 4; ++nu)
        for (int m = 0; m < 4; ++m) {
            trA[nu] += G2A[m][sym4(m, nu)];
            trB[nu] += G2B[m][sym4(m, nu)];
        }
    for (int e = 0; e < 4; ++e)
        for (int m = 0; m < 4; ++m) {
            divA[e] += dgiA[m][sym4(m, e)];
            divB[e] += dgiB[m][sym4(m, e)];
        }

    auto mixed = [&](int a, int b) {
        // T1 = d_a g^{mn} d_n g_{bm},  T2 = d_a g^{mn} d_b g_{mn}
        double T1ab = 0.0, T1ba = 0.0, T2 = 0.0;
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) {
                T1ab += dgiA[a][sym4(m, n)] * dgB[n][sym4(b, m)] +
                        dgiB[a][sym4(m, n)] * dgA[n][sym4(b, m)];
                T1ba += dgiA[b][sym4(m, n)] * dgB[n][sym4(a, m)] +
                        dgiB[b][sym4(m, n)] * dgA[n][sym4(a, m)];
                T2 += dgiA[a][sym4(m, n)] * dgB[b][sym4(m, n)] +
                      dgiB[a][sym4(m, n)] * dgA[b][sym4(m, n)];
            }
        // T3 = d_m g^{me} Gamma_{e,ab},  T4 = d_b g^{me} Gamma_{e,ma}
        double T3 = 0.0, T4 = 0.0;
        for (int e = 0; e < 4; ++e) {
            T3 += divA[e] * G1B[e][sym4(a, b)] + divB[e] * G1A[e][sym4(a, b)];
            for (int m = 0; m < 4; ++m)
                T4 += dgiA[b][sym4(m, e)] * G1B[e][sym4(m, a)] +
                      dgiB[b][sym4(m, e)] * G1A[e][sym4(m, a)];
        }
        // T5 = Gamma^m_{mn} Gamma^n_{ab},  T6 = Gamma^m_{bn} Gamma^n_{ma}
        double T5 = 0.0, T6 = 0.0;
        for (int n = 0; n < 4; ++n) {
            T5 += trA[n] * G2B[n][sym4(a, b)] + trB[n] * G2A[n][sym4(a, b)];
            for (int m = 0; m < 4; ++m)
                T6 += G2A[m][sym4(b, n)] * G2B[n][sym4(m, a)] +
                      G2B[m][sym4(b, n)] * G2A[n][sym4(m, a)];
        }
        // H = 2S, S = -sym(T1) + T2/2 + T3 - T4 + T5 - T6; each T* above
        // already carries the A/B symmetrization (factor 2 at A == B), so
        // divide by 2 to make Hbil(dg,dg) == H(dg) exactly.
        return 2.0 * 0.5 *
               (-0.5 * (T1ab + T1ba) + 0.5 * T2 + T3 - T4 + T5 - T6);
    };

    // S is symmetric as a polynomial, so filling a <= b covers the tensor
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) H[sym4(a, b)] = mixed(a, b);
}

}  // namespace

void quadratic_remainder(const double gi[10],
                         const std::array<std::array<double, 10>, 4>& dg, double H[10]) {
    remainder_core(gi, dg, dg, H);
}

void quadratic_remainder_bilinear(const double gi[10],
                                  const std::array<std::array<double, 10>, 4>& dgA,
                                  const std::array<std::array<double, 10>, 4>& dgB,
                                  double H[10]) {
    remainder_core(gi, dgA, dgB, H);
}

bool lorentzian_signature(const double g[10]) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(unpack(g), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    return ev[0] < 0.0 && ev[1] > 0.0 && ev[2] > 0.0 && ev[3] > 0.0;
}

}  // namespace point

namespace {

/// Gather all four derivative sets of a 10-component metric field at p.
std::array<std::array<double, 10>, 4> metric_derivs(const Field& g, const Field& dtg,
                                                    std::size_t p) {
    std::array<std::array<double, 10>, 4> dg;
    for (int s = 0; s < 10; ++s) dg[0][s] = dtg.at(p, s);
    for (int a = 0; a < 3; ++a) g.deriv_all(p, a, dg[a + 1].data());
    return dg;
}

}  // namespace

Field invert_metric(const Field& g) {
    Field gi(g.grid(), 10);
    for (std::size_t p = 0; p < g.npoints(); ++p) {
        const double det = point::invert(g.point(p), gi.point(p));
        if (std::abs(det) <= 1e-14) throw SingularMetric(p);
    }
    return gi;
}

Field christoffel(const Field& g, const Field& dtg) {
    const Field gi = invert_metric(g);
    Field out(g.grid(), 40);
    parallel_for(g.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const auto dg = metric_derivs(g, dtg, p);
            double G1[4][10], G2[4][10];
            point::christoffel_first(dg, G1);
            point::christoffel_second(gi.point(p), G1, G2);
            for (int m = 0; m < 4; ++m)
                for (int s = 0; s < 10; ++s) out.at(p, m * 10 + s) = G2[m][s];
        }
    });
    return out;
}

Field ricci_oracle(const Field& g, const TimeDerivs& td) {
    const Field gi = invert_metric(g);
    const Field G = christoffel(g, td.dtg);

    // time derivative of Gamma^m_{ab} from (g, dtg, dttg, spatial FD of dtg)
    Field dtG(g.grid(), 40);
    parallel_for(g.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const auto dg = metric_derivs(g, td.dtg, p);
            std::array<std::array<double, 10>, 4> ddtg;  // d_nu (d_t g)
            for (int s = 0; s < 10; ++s) ddtg[0][s] = td.dttg.at(p, s);
            for (int a = 0; a < 3; ++a) td.dtg.deriv_all(p, a, ddtg[a + 1].data());

            double G1[4][10], dtG1[4][10];
            point::christoffel_first(dg, G1);
            point::christoffel_first(ddtg, dtG1);

            // d_t g^{me} = -g^{mr} g^{es} d_t g_{rs}
            const double* giv = gi.point(p);
            double dtgi[10];
            for (int m = 0; m < 4; ++m)
                for (int e2 = m; e2 < 4; ++e2) {
                    double acc = 0.0;
                    for (int r = 0; r < 4; ++r)
                        for (int s = 0; s < 4; ++s)
                            acc -= giv[sym4(m, r)] * giv[sym4(e2, s)] * td.dtg.at(p, sym4(r, s));
                    dtgi[sym4(m, e2)] = acc;
                }

            for (int m = 0; m < 4; ++m)
                for (int s = 0; s < 10; ++s) {
                    double acc = 0.0;
                    for (int e2 = 0; e2 < 4; ++e2)
                        acc += dtgi[sym4(m, e2)] * G1[e2][s] + giv[sym4(m, e2)] * dtG1[e2][s];
                    dtG.at(p, m * 10 + s) = acc;
                }
        }
    });

    Field R(g.grid(), 10);
    parallel_for(g.npoints(), [&](std::size_t b, std::size_t e) {
        std::vector<double> dG(40);
        for (std::size_t p = b; p < e; ++p) {
            // d_nu Gamma^m_{ab}: nu = 0 from dtG, spatial from FD of G
            std::array<std::array<double, 40>, 4> d;
            for (int c = 0; c < 40; ++c) d[0][c] = dtG.at(p, c);
            for (int a = 0; a < 3; ++a) {
                G.deriv_all(p, a, dG.data());
                for (int c = 0; c < 40; ++c) d[a + 1][c] = dG[c];
            }
            const double* Gp = G.point(p);
            for (int a = 0; a < 4; ++a)
                for (int bb = a; bb < 4; ++bb) {
                    double r = 0.0;
                    for (int m = 0; m < 4; ++m) {
                        r += d[m][m * 10 + sym4(a, bb)] - d[bb][m * 10 + sym4(m, a)];
                        for (int n = 0; n < 4; ++n)
                            r += Gp[m * 10 + sym4(m, n)] * Gp[n * 10 + sym4(a, bb)] -
                                 Gp[m * 10 + sym4(bb, n)] * Gp[n * 10 + sym4(m, a)];
                    }
                    R.at(p, sym4(a, bb)) = r;
                }
        }
    });
    return R;
}

Field lower_index(const Field& u, const Field& g) {
    Field out(u.grid(), 4);
    for (std::size_t p = 0; p < u.npoints(); ++p)
        for (int a = 0; a < 4; ++a) {
            double acc = 0.0;
            for (int b = 0; b < 4; ++b) acc += g.at(p, sym4(a, b)) * u.at(p, b);
            out.at(p, a) = acc;
        }
    return out;
}

Field raise_index(const Field& xi, const Field& g) {
    const Field gi = invert_metric(g);
    Field out(xi.grid(), 4);
    for (std::size_t p = 0; p < xi.npoints(); ++p)
        for (int a = 0; a < 4; ++a) {
            double acc = 0.0;
            for (int b = 0; b < 4; ++b) acc += gi.at(p, sym4(a, b)) * xi.at(p, b);
            out.at(p, a) = acc;
        }
    return out;
}

Field harmonic_residual(const Field& g, const Field& dtg) {
    const Field gi = invert_metric(g);
    Field out(g.grid(), 4);
    parallel_for(g.npoints(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            const auto dg = metric_derivs(g, dtg, p);
            double G1[4][10], G2[4][10], F[4];
            point::christoffel_first(dg, G1);
            point::christoffel_second(gi.point(p), G1, G2);
            point::gauge_functional(gi.point(p), G2, F);
            for (int m = 0; m < 4; ++m) out.at(p, m) = F[m];
        }
    });
    return out;
}

void check_signature(const Field& g, std::size_t stride) {
    for (std::size_t p = 0; p < g.npoints(); p += stride)
        if (!point::lorentzian_signature(g.point(p)))
            throw Error("metric signature is not (-,+,+,+) at point " + std::to_string(p));
}

}  // namespace geometry
}  // namespace gravfluid
