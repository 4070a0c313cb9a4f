#include "gravfluid/initial_data.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gravfluid {
namespace initial_data {

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::Matrix3d unpack3(const double* h) {
    Eigen::Matrix3d m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = h[sym3(a, b)];
    return m;
}

/// 3-Christoffels of the second kind from finite differences of h.
void christoffel3(const Field& h, const Field& hinv, std::size_t p, double G[3][6]) {
    double dh[3][6];
    for (int c = 0; c < 3; ++c) h.deriv_all(p, c, dh[c]);
    double G1[3][6];
    for (int e = 0; e < 3; ++e)
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                G1[e][sym3(a, b)] =
                    0.5 * (dh[a][sym3(e, b)] + dh[b][sym3(e, a)] - dh[e][sym3(a, b)]);
    for (int m = 0; m < 3; ++m)
        for (int s = 0; s < 6; ++s) {
            double acc = 0.0;
            for (int e = 0; e < 3; ++e) acc += hinv.at(p, sym3(m, e)) * G1[e][s];
            G[m][s] = acc;
        }
}

Field invert3(const Field& h) {
    Field out(h.grid(), 6);
    for (std::size_t p = 0; p < h.npoints(); ++p) {
        const Eigen::Matrix3d m = unpack3(h.point(p));
        Eigen::LLT<Eigen::Matrix3d> llt(m);
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite(p);
        const Eigen::Matrix3d inv = m.inverse();
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) out.at(p, sym3(a, b)) = inv(a, b);
    }
    return out;
}

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double fa = std::exp(-1.0 / u);
    const double fb = std::exp(-1.0 / (1.0 - u));
    return fa / (fa + fb);
}

}  // namespace

double chi_cutoff(double r, double M) { return 1.0 - smoothstep(r - M); }

void check_positive_definite(const Field& h) { (void)invert3(h); }

SliceCompletion complete_gauge_data(const GeometricData& geo) {
    const Field hinv = invert3(geo.h);
    SliceCompletion out{Field(geo.h.grid(), 10), Field(geo.h.grid(), 10)};
    for (std::size_t p = 0; p < geo.h.npoints(); ++p) {
        double* g = out.g.point(p);
        double* dtg = out.dtg.point(p);
        g[sym4(0, 0)] = -1.0;
        for (int a = 0; a < 3; ++a) g[sym4(0, a + 1)] = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) g[sym4(a + 1, b + 1)] = geo.h.at(p, sym3(a, b));

        double trK = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) trK += hinv.at(p, sym3(a, b)) * geo.K.at(p, sym3(a, b));
        dtg[sym4(0, 0)] = 2.0 * trK;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                dtg[sym4(a + 1, b + 1)] = -2.0 * geo.K.at(p, sym3(a, b));

        double dh[3][6];
        for (int c = 0; c < 3; ++c) geo.h.deriv_all(p, c, dh[c]);
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += hinv.at(p, sym3(a, b)) * (dh[a][sym3(b, c)] - 0.5 * dh[c][sym3(a, b)]);
            dtg[sym4(0, c + 1)] = acc;
        }
    }
    return out;
}

Field scalar_curvature3(const Field& h) {
    const Field hinv = invert3(h);
    // Gamma field, then R_ab by finite differences of Gamma
    Field G(h.grid(), 18);
    for (std::size_t p = 0; p < h.npoints(); ++p) {
        double Gp[3][6];
        christoffel3(h, hinv, p, Gp);
        for (int m = 0; m < 3; ++m)
            for (int s = 0; s < 6; ++s) G.at(p, m * 6 + s) = Gp[m][s];
    }
    Field R(h.grid(), 1);
    for (std::size_t p = 0; p < h.npoints(); ++p) {
        double dG[3][18];
        for (int c = 0; c < 3; ++c) G.deriv_all(p, c, dG[c]);
        const double* Gp = G.point(p);
        double Rab[6];
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                double r = 0.0;
                for (int m = 0; m < 3; ++m) {
                    r += dG[m][m * 6 + sym3(a, b)] - dG[b][m * 6 + sym3(m, a)];
                    for (int n = 0; n < 3; ++n)
                        r += Gp[m * 6 + sym3(m, n)] * Gp[n * 6 + sym3(a, b)] -
                             Gp[m * 6 + sym3(b, n)] * Gp[n * 6 + sym3(m, a)];
                }
                Rab[sym3(a, b)] = r;
            }
        double scal = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) scal += hinv.at(p, sym3(a, b)) * Rab[sym3(a, b)];
        R.at(p, 0) = scal;
    }
    return R;
}

ConstraintResiduals constraint_residuals(const GeometricData& geo, const MatterData& matter) {
    const Field hinv = invert3(geo.h);
    const Field R = scalar_curvature3(geo.h);

    // raised K and its trace as fields, for covariant divergence
    Field Kup(geo.h.grid(), 6), trK(geo.h.grid(), 1);
    for (std::size_t p = 0; p < geo.h.npoints(); ++p) {
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                double acc = 0.0;
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d)
                        acc += hinv.at(p, sym3(a, c)) * hinv.at(p, sym3(b, d)) *
                               geo.K.at(p, sym3(c, d));
                Kup.at(p, sym3(a, b)) = acc;
            }
        double tr = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                tr += hinv.at(p, sym3(a, b)) * geo.K.at(p, sym3(a, b));
        trK.at(p, 0) = tr;
    }

    ConstraintResiduals out{Field(geo.h.grid(), 1), Field(geo.h.grid(), 3)};
    for (std::size_t p = 0; p < geo.h.npoints(); ++p) {
        double KK = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                KK += geo.K.at(p, sym3(a, b)) * Kup.at(p, sym3(a, b));
        const double tr = trK.at(p, 0);
        out.hamiltonian.at(p, 0) =
            R.at(p, 0) - KK + tr * tr - 16.0 * kPi * matter.z.at(p, 0);

        double G[3][6];
        christoffel3(geo.h, hinv, p, G);
        double dKup[3][6], dtr[3];
        for (int c = 0; c < 3; ++c) {
            Kup.deriv_all(p, c, dKup[c]);
            dtr[c] = trK.deriv(p, 0, c);
        }
        for (int a = 0; a < 3; ++a) {
            // nabla_b K^{ab} = d_b K^{ab} + G^a_{bc} K^{cb} + G^b_{bc} K^{ac}
            double div = 0.0;
            for (int b = 0; b < 3; ++b) {
                div += dKup[b][sym3(a, b)];
                for (int c = 0; c < 3; ++c)
                    div += G[a][sym3(b, c)] * Kup.at(p, sym3(c, b)) +
                           G[b][sym3(b, c)] * Kup.at(p, sym3(a, c));
            }
            double gradtr = 0.0;
            for (int b = 0; b < 3; ++b) gradtr += hinv.at(p, sym3(a, b)) * dtr[b];
            out.momentum.at(p, a) = div - gradtr + 8.0 * kPi * matter.j.at(p, a);
        }
    }
    return out;
}

MatterData compatibility_map(const Field& w, const Field& ubar, const Field& h,
                             const EquationOfState& eos, bool printed_variant) {
    MatterData out{Field(w.grid(), 1), Field(w.grid(), 3)};
    for (std::size_t p = 0; p < w.npoints(); ++p) {
        const double wv = w.at(p, 0);
        if (wv < 0.0) throw NegativeMakino();
        const double eps = std::pow(wv, eos.beta());
        const double kw2 = eos.K * wv * wv;
        double uu = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                uu += h.at(p, sym3(a, b)) * ubar.at(p, a) * ubar.at(p, b);
        out.z.at(p, 0) = printed_variant ? eps * (1.0 + (1.0 + kw2)) * uu
                                         : eps * (1.0 + (1.0 + kw2) * uu);
        const double lorentz = std::sqrt(1.0 + uu);
        for (int a = 0; a < 3; ++a)
            out.j.at(p, a) = eps * (1.0 + kw2) * ubar.at(p, a) * lorentz;
    }
    return out;
}

Field slice_four_velocity(const Field& ubar, const Field& h) {
    Field u(ubar.grid(), 4);
    for (std::size_t p = 0; p < ubar.npoints(); ++p) {
        double uu = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                uu += h.at(p, sym3(a, b)) * ubar.at(p, a) * ubar.at(p, b);
        u.at(p, 0) = std::sqrt(1.0 + uu);
        for (int a = 0; a < 3; ++a) u.at(p, a + 1) = ubar.at(p, a);
    }
    return u;
}

Field regularize_initial(const Field& w0, double rho, double M, double mollifier_width) {
    const GridSpec& grid = w0.grid();
    if (mollifier_width < 0.0) {
        // analytic path: chi_M (w0 + rho) with no discrete smoothing, for
        // profiles that are already smooth (keeps the data grid-independent)
        Field out(grid, 1);
        for (std::size_t p = 0; p < grid.npoints(); ++p) {
            const auto x = grid.point(p);
            double r2 = 0.0;
            for (int a = 0; a < 3; ++a)
                if (grid.active(a)) r2 += x[a] * x[a];
            out.at(p, 0) = chi_cutoff(std::sqrt(r2), M) * (w0.at(p, 0) + rho);
        }
        return out;
    }
    double width = mollifier_width;
    if (width <= 0.0) {
        width = 0.0;
        for (int a = 0; a < 3; ++a)
            if (grid.active(a)) width = std::max(width, 4.0 * grid.spacing(a));
    }

    // radial bump kernel on the active axes, normalized discretely
    std::array<int, 3> reach{0, 0, 0};
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) reach[a] = int(std::ceil(width / grid.spacing(a)));

    Field out(grid, 1);
    std::vector<std::array<int, 3>> offsets;
    std::vector<double> weight;
    for (int di = -reach[0]; di <= reach[0]; ++di)
        for (int dj = -reach[1]; dj <= reach[1]; ++dj)
            for (int dk = -reach[2]; dk <= reach[2]; ++dk) {
                const double r2 =
                    std::pow(di * grid.spacing(0), 2) + std::pow(dj * grid.spacing(1), 2) +
                    std::pow(dk * grid.spacing(2), 2);
                const double q = r2 / (width * width);
                if (q >= 1.0) continue;
                offsets.push_back({di, dj, dk});
                weight.push_back(std::exp(-1.0 / (1.0 - q)));
            }
    double wsum = 0.0;
    for (double v : weight) wsum += v;
    for (double& v : weight) v /= wsum;

    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        double acc = 0.0;
        for (std::size_t q = 0; q < offsets.size(); ++q) {
            std::size_t pp = p;
            pp = grid.neighbor(pp, 0, offsets[q][0]);
            pp = grid.neighbor(pp, 1, offsets[q][1]);
            pp = grid.neighbor(pp, 2, offsets[q][2]);
            acc += weight[q] * w0.at(pp, 0);
        }
        const auto x = grid.point(p);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a)
            if (grid.active(a)) r2 += x[a] * x[a];
        out.at(p, 0) = chi_cutoff(std::sqrt(r2), M) * (acc + rho);
    }
    return out;
}

}  // namespace initial_data
}  // namespace gravfluid
