#include "gravfluid/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "gravfluid/fluid.hpp"
#include "gravfluid/geometry.hpp"
#include "gravfluid/reduction.hpp"

namespace gravfluid {
namespace evolve {

namespace {

void axpy(Field& y, double a, const Field& x) {
    auto& yd = y.data();
    const auto& xd = x.data();
    for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += a * xd[i];
}

Field rk4(const Field& U, double dt, const std::function<Field(const Field&)>& rhs) {
    const Field k1 = rhs(U);
    Field s = U;
    axpy(s, 0.5 * dt, k1);
    const Field k2 = rhs(s);
    s = U;
    axpy(s, 0.5 * dt, k2);
    const Field k3 = rhs(s);
    s = U;
    axpy(s, dt, k3);
    const Field k4 = rhs(s);
    Field out = U;
    axpy(out, dt / 6.0, k1);
    axpy(out, dt / 3.0, k2);
    axpy(out, dt / 3.0, k3);
    axpy(out, dt / 6.0, k4);
    return out;
}

void scan_finite(const Field& U, double t) {
    for (std::size_t p = 0; p < U.npoints(); ++p)
        for (int c = 0; c < U.ncomp(); ++c)
            if (!std::isfinite(U.at(p, c))) throw NonFinite(t, p, c);
}

}  // namespace

Field step_direct(const Field& U, const EquationOfState& eos, double dt, bool freeze_metric) {
    return rk4(U, dt, [&](const Field& s) {
        return reduction::evolution_rhs(s, eos, freeze_metric);
    });
}

int interior_margin(const GridSpec& grid, double t) {
    if (grid.boundary == BoundaryMode::Periodic) return 0;
    const double h = grid.min_spacing();
    return grid.stencil_halfwidth() + int(std::ceil(t / h)) + 1;
}

namespace {

MonitorRecord measure(const Field& U, const EquationOfState& eos, double t, double eps_cons,
                      const wsobolev::NormSpec& nspec, const wsobolev::NormEngine& engine) {
    MonitorRecord rec;
    rec.t = t;
    rec.eps_consistency = eps_cons;

    Field g, dtg, w, u;
    reduction::unpack_state(U, eos, g, dtg, w, u);
    const int margin = interior_margin(U.grid(), t);
    rec.norm_drift = fluid::normalization_drift(g, u).max_abs_interior(margin);
    rec.harmonic_residual = geometry::harmonic_residual(g, dtg).max_abs_interior(margin);
    rec.a0_min_eig = reduction::min_A0_eigenvalue(U, eos);
    rec.energy_x =
        wsobolev::energy_x_norm(U, nspec, wsobolev::weights_from_state(U, eos), engine);
    return rec;
}

}  // namespace

RunResult run(const Field& U0, const EquationOfState& eos, const EvolutionConfig& cfg,
              const wsobolev::NormSpec& nspec, const wsobolev::NormEngine& engine) {
    {
        Field g, dtg, w, u;
        reduction::unpack_state(U0, eos, g, dtg, w, u);
        geometry::check_signature(g, std::max<std::size_t>(1, U0.npoints() / 64));
    }
    const double vmax = std::max(reduction::max_char_speed(U0, eos), 1e-6);
    const double limit = cfg.cfl * U0.grid().min_spacing() / vmax;
    double dt = cfg.dt > 0.0 ? cfg.dt : limit;
    if (dt > limit * (1.0 + 1e-12)) throw CflViolation(dt, limit);
    const int steps = std::max(1, int(std::ceil(cfg.t_end / dt - 1e-12)));
    dt = cfg.t_end / steps;

    RunResult res;
    res.dt_used = dt;
    res.steps = steps;
    res.state = U0;
    res.monitors.push_back(measure(U0, eos, 0.0, 0.0, nspec, engine));

    for (int i = 0; i < steps; ++i) {
        res.state = step_direct(res.state, eos, dt, cfg.freeze_metric);
        const double t = dt * (i + 1);
        scan_finite(res.state, t);
        if (cfg.signature_check_each_step) {
            Field g, dtg, w, u;
            reduction::unpack_state(res.state, eos, g, dtg, w, u);
            geometry::check_signature(g, std::max<std::size_t>(1, res.state.npoints() / 16));
        }
        if ((i + 1) % std::max(1, cfg.monitor_every) == 0 || i + 1 == steps)
            res.monitors.push_back(measure(res.state, eos, t, 0.0, nspec, engine));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Picard mode

Field Trajectory::at(double t) const {
    const int n = int(states.size()) - 1;
    double s = t / dt;
    s = std::clamp(s, 0.0, double(n));
    const int i = std::min(int(s), n - 1 < 0 ? 0 : n - 1);
    const double fr = s - i;
    if (fr == 0.0 || i + 1 > n) return states[std::size_t(i)];
    Field out = states[std::size_t(i)];
    auto& od = out.data();
    const auto& nx = states[std::size_t(i) + 1].data();
    for (std::size_t q = 0; q < od.size(); ++q) od[q] = (1.0 - fr) * od[q] + fr * nx[q];
    return out;
}

Trajectory Trajectory::constant(const Field& U0, double dt, int steps) {
    Trajectory tr;
    tr.dt = dt;
    tr.states.assign(std::size_t(steps) + 1, U0);
    return tr;
}

namespace {

/// Linear right side: coefficients from `coeff`, unknown `Unew`, solved
/// blockwise against A^0(coeff).
Field linear_rhs(const Field& coeff, const Field& Unew, const EquationOfState& eos) {
    Field out(Unew.grid(), layout::nU);
    parallel_for(Unew.npoints(), [&](std::size_t b, std::size_t e) {
        std::array<std::vector<double>, 3> d;
        for (auto& v : d) v.resize(layout::nU);
        for (std::size_t p = b; p < e; ++p) {
            if (!Unew.grid().evolves(p)) continue;
            for (int a = 0; a < 3; ++a) Unew.deriv_all(p, a, d[a].data());
            const auto ps = reduction::decode(coeff.point(p), eos, p);
            const double* un = Unew.point(p);
            double* rhs = out.point(p);

            std::array<std::array<double, 10>, 4> hnew;
            for (int s = 0; s < 10; ++s) {
                hnew[0][s] = un[layout::dtv0 + s];
                for (int a = 0; a < 3; ++a) hnew[1 + a][s] = un[layout::dxv(a, s)];
            }

            // v rows
            for (int s = 0; s < 10; ++s) rhs[layout::v0 + s] = un[layout::dtv0 + s];

            // dtv rows: principal part and B(U^k) (v,dtv,dxv)^{k+1} + F(U^k)
            double Hb[10], f[10];
            geometry::point::quadratic_remainder_bilinear(ps.gi, ps.h, hnew, Hb);
            reduction::source_f(ps, f);
            for (int s = 0; s < 10; ++s) {
                double acc = 0.0;
                for (int a = 0; a < 3; ++a) {
                    acc += 2.0 * ps.gi[sym4(0, a + 1)] * d[a][layout::dtv0 + s];
                    for (int bb = 0; bb < 3; ++bb)
                        acc += ps.gi[sym4(a + 1, bb + 1)] * d[a][layout::dxv(bb, s)];
                }
                rhs[layout::dtv0 + s] = ps.m * (acc - Hb[s]) + f[s];
            }

            // dxv rows
            for (int bb = 0; bb < 3; ++bb)
                for (int s = 0; s < 10; ++s) {
                    double acc = 0.0;
                    for (int a = 0; a < 3; ++a)
                        acc += ps.gi[sym4(bb + 1, a + 1)] * d[a][layout::dtv0 + s];
                    rhs[layout::dxv(bb, s)] = ps.m * acc;
                }

            // W rows
            const auto fl = ps.fluid_view();
            const auto A = fluid::fluid_matrices_scaled(fl);
            double G1[4][10], G2[4][10];
            geometry::point::christoffel_first(hnew, G1);
            geometry::point::christoffel_second(ps.gi, G1, G2);
            const auto l = fluid::lower_order_scaled(fl, G2);
            for (int i = 0; i < 5; ++i) {
                double acc = -l[i];
                for (int a = 0; a < 3; ++a)
                    for (int j = 0; j < 5; ++j) acc -= A[1 + a][i][j] * d[a][layout::w0 + j];
                rhs[layout::w0 + i] = acc;
            }
        }
    });
    reduction::apply_A0_inverse(coeff, eos, out);
    return out;
}

}  // namespace

Trajectory picard_iterate(const Trajectory& prev, const Field& U0, const EquationOfState& eos) {
    Trajectory next;
    next.dt = prev.dt;
    next.states.reserve(prev.states.size());
    next.states.push_back(U0);
    const int steps = int(prev.states.size()) - 1;
    for (int i = 0; i < steps; ++i) {
        const double t = prev.dt * i;
        const Field c0 = prev.states[std::size_t(i)];
        const Field ch = prev.at(t + 0.5 * prev.dt);
        const Field c1 = prev.states[std::size_t(i) + 1];
        const Field& U = next.states.back();

        const Field k1 = linear_rhs(c0, U, eos);
        Field s = U;
        axpy(s, 0.5 * prev.dt, k1);
        const Field k2 = linear_rhs(ch, s, eos);
        s = U;
        axpy(s, 0.5 * prev.dt, k2);
        const Field k3 = linear_rhs(ch, s, eos);
        s = U;
        axpy(s, prev.dt, k3);
        const Field k4 = linear_rhs(c1, s, eos);

        Field out = U;
        axpy(out, prev.dt / 6.0, k1);
        axpy(out, prev.dt / 3.0, k2);
        axpy(out, prev.dt / 3.0, k3);
        axpy(out, prev.dt / 6.0, k4);
        scan_finite(out, t + prev.dt);
        next.states.push_back(std::move(out));
    }
    return next;
}

Field transport_epsilon(const Field& eps, const TransportCoeffs& co, double dt) {
    const GridSpec& grid = eps.grid();
    const wsobolev::Sampler b0 = wsobolev::sampler_from_field(co.b0);
    const wsobolev::Sampler b1 = wsobolev::sampler_from_field(co.b1);
    const wsobolev::Sampler c0 = wsobolev::sampler_from_field(co.c0);
    const wsobolev::Sampler c1 = wsobolev::sampler_from_field(co.c1);
    const wsobolev::Sampler e0 = wsobolev::sampler_from_field(eps);

    // map grid axes to sampler coordinates (active axes in order)
    std::vector<int> axes;
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) axes.push_back(a);

    auto bvec = [&](double theta, const std::array<double, 3>& xs, int axis_slot) {
        // theta in [0,1]: time fraction within the step (0 = start)
        const double v0 = b0.eval(xs, axis_slot);
        const double v1 = b1.eval(xs, axis_slot);
        return (1.0 - theta) * v0 + theta * v1;
    };

    Field out(grid, 1);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const auto xg = grid.point(p);
        std::array<double, 3> x{0, 0, 0};
        for (std::size_t d = 0; d < axes.size(); ++d) x[d] = xg[axes[d]];

        // RK4 backward trace from t+dt to t: dx/ds = -b(t+dt-s, x); the
        // velocity component for sampler slot d is the grid axis axes[d]
        auto vel = [&](double s, const std::array<double, 3>& xs, std::size_t d) {
            return -bvec(1.0 - s / dt, xs, axes[d]);
        };
        std::array<double, 3> k1{}, k2{}, k3{}, k4{}, xs{};
        for (std::size_t d = 0; d < axes.size(); ++d) k1[d] = vel(0.0, x, d);
        for (std::size_t d = 0; d < axes.size(); ++d) xs[d] = x[d] + 0.5 * dt * k1[d];
        for (std::size_t d = 0; d < axes.size(); ++d) k2[d] = vel(0.5 * dt, xs, d);
        for (std::size_t d = 0; d < axes.size(); ++d) xs[d] = x[d] + 0.5 * dt * k2[d];
        for (std::size_t d = 0; d < axes.size(); ++d) k3[d] = vel(0.5 * dt, xs, d);
        for (std::size_t d = 0; d < axes.size(); ++d) xs[d] = x[d] + dt * k3[d];
        for (std::size_t d = 0; d < axes.size(); ++d) k4[d] = vel(dt, xs, d);
        std::array<double, 3> dep{};
        for (std::size_t d = 0; d < axes.size(); ++d)
            dep[d] = x[d] + dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);

        // periodic wrap of the departure point
        for (std::size_t d = 0; d < axes.size(); ++d) {
            const int a = axes[d];
            if (grid.boundary == BoundaryMode::Periodic) {
                const double L = grid.extent[a];
                dep[d] -= L * std::floor((dep[d] + 0.5 * L) / L);
            }
        }

        // trapezoid source along the path: c at arrival (t+dt, x) and at the
        // departure point (t, dep)
        const double src = 0.5 * (c1.eval(x, 0) + c0.eval(dep, 0));
        out.at(p, 0) = e0.eval(dep, 0) - dt * src;
    }
    return out;
}

PicardResult picard_run(const Field& U0, const EquationOfState& eos, double T, double dt,
                        int iters, double delta, double u0_min) {
    const int steps = std::max(1, int(std::ceil(T / dt - 1e-12)));
    dt = T / steps;

    const wsobolev::EnergyWeights weights = wsobolev::weights_from_state(U0, eos);

    // epsilon initial data: w0^beta
    Field g0, dtg0, w0, u0;
    reduction::unpack_state(U0, eos, g0, dtg0, w0, u0);
    Field eps0(U0.grid(), 1);
    for (std::size_t p = 0; p < U0.npoints(); ++p)
        eps0.at(p, 0) = std::pow(std::max(w0.at(p, 0), 0.0), eos.beta());

    Trajectory traj = Trajectory::constant(U0, dt, steps);
    std::vector<Field> eps_traj(std::size_t(steps) + 1, eps0);

    PicardResult res;
    for (int k = 0; k < iters; ++k) {
        Trajectory next = picard_iterate(traj, U0, eos);

        // transport epsilon along the new sweep, coefficients from (traj, eps_traj, next)
        std::vector<Field> eps_next;
        eps_next.reserve(eps_traj.size());
        eps_next.push_back(eps0);
        for (int i = 0; i < steps; ++i) {
            TransportCoeffs co;
            co.b0 = Field(U0.grid(), 3);
            co.b1 = Field(U0.grid(), 3);
            co.c0 = Field(U0.grid(), 1);
            co.c1 = Field(U0.grid(), 1);
            for (int end = 0; end < 2; ++end) {
                const Field& Uk = traj.states[std::size_t(i + end)];
                const Field& eps_k = eps_traj[std::size_t(i + end)];
                const Field& Un = next.states[std::size_t(i + end)];
                // centered time derivative of u^{k+1} on the sweep
                const int ic = i + end;
                const int ilo = std::max(0, ic - 1), ihi = std::min(steps, ic + 1);
                Field& b = end ? co.b1 : co.b0;
                Field& c = end ? co.c1 : co.c0;
                for (std::size_t p = 0; p < U0.npoints(); ++p) {
                    const auto ps = reduction::decode(Uk.point(p), eos, p);
                    if (ps.u[0] < u0_min) throw LapseCollapse(ps.u[0]);
                    for (std::size_t d = 0; d < 3; ++d)
                        b.at(p, int(d)) = ps.u[1 + d] / ps.u[0];

                    // du^{k+1}: time by trajectory differences, space by FD
                    double du[4][4];  // [nu][alpha]
                    for (int al = 0; al < 4; ++al) {
                        const int comp = layout::w0 + 1 + al;
                        du[0][al] = (next.states[std::size_t(ihi)].at(p, comp) -
                                     next.states[std::size_t(ilo)].at(p, comp)) /
                                    (dt * (ihi - ilo));
                        for (int a = 0; a < 3; ++a) du[1 + a][al] = Un.deriv(p, comp, a);
                    }
                    double G2[4][10];
                    {
                        double G1[4][10];
                        geometry::point::christoffel_first(ps.h, G1);
                        geometry::point::christoffel_second(ps.gi, G1, G2);
                    }
                    const auto fl = ps.fluid_view();
                    double acc = 0.0;
                    for (int nu = 0; nu < 4; ++nu)
                        for (int al = 0; al < 4; ++al) {
                            double gu = 0.0;
                            for (int mu = 0; mu < 4; ++mu)
                                gu += G2[al][sym4(nu, mu)] * ps.u[mu];
                            acc += fl.P(nu, al) * (du[nu][al] + gu);
                        }
                    const double kw2 = eos.K * ps.w * ps.w;
                    c.at(p, 0) = eps_k.at(p, 0) * (1.0 + kw2) * acc / ps.u[0];
                }
            }
            eps_next.push_back(transport_epsilon(eps_next.back(), co, dt));
        }

        double diff = 0.0;
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            Field d = next.states[i];
            axpy(d, -1.0, traj.states[i]);
            diff = std::max(diff, wsobolev::y_delta_norm(d, delta, weights));
        }
        res.diff_sup.push_back(diff);

        traj = std::move(next);
        eps_traj = std::move(eps_next);
    }

    for (std::size_t k = 1; k < res.diff_sup.size(); ++k)
        res.ratios.push_back(res.diff_sup[k] / std::max(res.diff_sup[k - 1], 1e-300));

    res.state = traj.states.back();
    res.eps = eps_traj.back();
    Field g, dtg, w, u;
    reduction::unpack_state(res.state, eos, g, dtg, w, u);
    double cons = 0.0;
    for (std::size_t p = 0; p < res.state.npoints(); ++p)
        cons = std::max(cons, std::abs(res.eps.at(p, 0) -
                                       std::pow(std::max(w.at(p, 0), 0.0), eos.beta())));
    res.eps_consistency = cons;
    res.trajectory = std::move(traj);
    res.eps_trajectory = std::move(eps_traj);
    return res;
}

GronwallFit gronwall_check(const std::vector<std::pair<double, double>>& series) {
    GronwallFit fit;
    if (series.size() < 10) return fit;
    const double y0 = std::log(series.front().second + 1.0);

    double cb = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [t, E] : series) {
        if (!std::isfinite(E) || E < 0.0) return fit;
        const double y = std::log(E + 1.0);
        if (t > 0.0) cb = std::max(cb, (y - y0) / t);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double n = double(series.size());
    fit.c_bound = cb;
    fit.c_ls = (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-300);

    double slack = 0.0;
    const double E0 = series.front().second;
    for (const auto& [t, E] : series) {
        const double bound = (E0 + 1.0) * std::exp(fit.c_bound * t) - 1.0;
        slack = std::max(slack, (E - bound) / std::max(1.0, E));
    }
    fit.slack = std::max(slack, 0.0);
    fit.pass = std::isfinite(fit.c_bound) && fit.slack < 0.05;
    return fit;
}

}  // namespace evolve
}  // namespace gravfluid
