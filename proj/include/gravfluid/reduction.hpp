#pragma once

#include <Eigen/Dense>
#include <array>

#include "gravfluid/eos.hpp"
#include "gravfluid/field.hpp"
#include "gravfluid/fluid.hpp"

namespace gravfluid {
namespace reduction {

/// Decoded per-point view of the coupled state vector
/// U = (v, dtv, dxv, W), layout per `layout`. The fluid slot U[50] carries
/// kappa0*w so that A^0 at (v,W) = 0 is exactly the identity; `w` here is the
/// physical Makino variable.
struct PointState {
    double g[10];
    double gi[10];
    double det_g;
    double m;  ///< 1/(-g^{00}), the row normalization of the wave block
    double w;
    double u[4];
    std::array<std::array<double, 10>, 4> h;  ///< h[0] = dtv, h[1+a] = dxv_a
    EquationOfState eos;

    fluid::PointFluid fluid_view() const;
};

/// Throws SingularMetric / SingularLapse. Normalization and sign of w are
/// monitored during evolution, not enforced here.
PointState decode(const double* U, const EquationOfState& eos, std::size_t point_index = 0);

/// Matter source f of the dtv rows: f = -(8 pi w^beta / g^00)((1-K w^2) g_ab
/// + 2 (1+K w^2) u_a u_b); the vacuum continuation uses max(w,0)^beta.
void source_f(const PointState& ps, double f[10]);

/// Harmonic-gauge quadratic remainder evaluated on the state's own first
/// derivatives (dtv, dxv), not on finite differences of v.
void quadratic_H(const PointState& ps, double H[10]);

/// All 55x55 blocks materialized at one point, for dumps and cross-checks.
struct BlockSystem {
    Eigen::MatrixXd A0;                 // 55x55
    std::array<Eigen::MatrixXd, 3> Aa;  // 55x55 each
    std::array<Eigen::MatrixXd, 3> Ca;  // constant, 55x55
    Eigen::MatrixXd B;                  // 55x50, columns (v, dtv, dxv)
    Eigen::VectorXd F;                  // 55
};
BlockSystem assemble_point(const double* U, const EquationOfState& eos);

Eigen::MatrixXd assemble_A0_point(const double* U, const EquationOfState& eos);
std::array<Eigen::MatrixXd, 3> assemble_Aa_point(const double* U, const EquationOfState& eos);
std::array<Eigen::MatrixXd, 3> constant_Ca();

/// Full right side of the evolution system,
/// (A^a + C^a) d_a U + B (v, dtv, dxv)^T + F, at every grid point.
Field assemble_rhs(const Field& U, const EquationOfState& eos);

/// Same right side computed from the un-normalized row form and rescaled by
/// blockdiag(1, m, m, 1) afterwards; agrees with assemble_rhs to roundoff.
Field assemble_rhs_unscaled_route(const Field& U, const EquationOfState& eos);

/// Solve A^0 x = rhs blockwise in place (identity blocks free, the dxv and W
/// blocks by Cholesky per point). freeze_metric zeroes the metric rows.
void apply_A0_inverse(const Field& U, const EquationOfState& eos, Field& rhs,
                      bool freeze_metric = false);

/// d_t U = (A^0)^{-1} [(A^a + C^a) d_a U + B(...) + F].
Field evolution_rhs(const Field& U, const EquationOfState& eos, bool freeze_metric = false);

/// Smallest eigenvalue of A^0 over the grid (1 from identity blocks included).
double min_A0_eigenvalue(const Field& U, const EquationOfState& eos);

/// Largest characteristic speed over grid points and active axes, from the
/// null cone of g and the fluid sound cone.
double max_char_speed(const Field& U, const EquationOfState& eos);

/// Pack (g, dtg, w, u) into the 55-component state; dxv is the finite
/// difference of v, W[0] is kappa0*w.
Field pack_state(const Field& g, const Field& dtg, const Field& w, const Field& u,
                 const EquationOfState& eos);

/// Unpack to physical fields (g, dtg, w, u).
void unpack_state(const Field& U, const EquationOfState& eos, Field& g, Field& dtg, Field& w,
                  Field& u);

/// Closed-form H on grid fields (spatial derivatives by finite differences).
Field quadratic_terms(const Field& g, const Field& dtg);

/// f as a 10-component field.
Field source_field(const Field& U, const EquationOfState& eos);

/// Residual of the first-order compatibility dxv - D_x v (30 components).
Field reduction_residual(const Field& U);

}  // namespace reduction
}  // namespace gravfluid
