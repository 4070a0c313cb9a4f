#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "gravfluid/field.hpp"

namespace gftest {

using namespace gravfluid;

inline GridSpec grid_1d(int n, double L = 2.0 * M_PI,
                        BoundaryMode b = BoundaryMode::Periodic, int order = 4) {
    GridSpec g;
    g.n = {n, 1, 1};
    g.extent = {L, L, L};
    g.boundary = b;
    g.fd_order = order;
    return g;
}

inline GridSpec grid_3d(int n, double L = 2.0 * M_PI,
                        BoundaryMode b = BoundaryMode::Periodic, int order = 4) {
    GridSpec g;
    g.n = {n, n, n};
    g.extent = {L, L, L};
    g.boundary = b;
    g.fd_order = order;
    return g;
}

/// Fill a field from fn(x, component).
inline Field make_field(const GridSpec& grid, int ncomp,
                        const std::function<double(const std::array<double, 3>&, int)>& fn) {
    Field f(grid, ncomp);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const auto x = grid.point(p);
        for (int c = 0; c < ncomp; ++c) f.at(p, c) = fn(x, c);
    }
    return f;
}

inline Field minkowski(const GridSpec& grid) {
    return make_field(grid, 10, [](const std::array<double, 3>&, int c) {
        return c == 0 ? -1.0 : (c == 4 || c == 7 || c == 9) ? 1.0 : 0.0;
    });
}

/// Small random symmetric perturbation of eta, uniformly invertible.
inline Field perturbed_metric(const GridSpec& grid, double amp, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amp, amp);
    std::array<double, 10> pert;
    for (auto& v : pert) v = d(rng);
    Field g = minkowski(grid);
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        const auto x = grid.point(p);
        const double mod = 1.0 + 0.3 * std::sin(x[0]);
        for (int c = 0; c < 10; ++c) g.at(p, c) += pert[std::size_t(c)] * mod;
    }
    return g;
}

/// Measured convergence order from three errors at n, 2n, 4n.
inline double fitted_order(double e0, double e1, double e2) {
    return 0.5 * (std::log2(e0 / e1) + std::log2(e1 / e2));
}

/// Random future-directed normalized four-velocity for a given metric point.
inline void random_velocity(const double g[10], std::mt19937_64& rng, double vmax, double u[4]) {
    std::uniform_real_distribution<double> d(-vmax, vmax);
    const double ub[3] = {d(rng), d(rng), d(rng)};
    // solve g00 (u0)^2 + 2 g0a u0 ub^a + g_ab ub^a ub^b = -1 for u0 > 0
    const double a = g[sym4(0, 0)];
    double b = 0.0, c = 1.0;
    for (int i = 0; i < 3; ++i) {
        b += 2.0 * g[sym4(0, i + 1)] * ub[i];
        for (int j = 0; j < 3; ++j) c += g[sym4(i + 1, j + 1)] * ub[i] * ub[j];
    }
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    u[0] = (-b - disc) / (2.0 * a);
    for (int i = 0; i < 3; ++i) u[i + 1] = ub[i];
}

}  // namespace gftest
