#pragma once

#include "gravfluid/eos.hpp"
#include "gravfluid/field.hpp"

namespace gravfluid {
namespace initial_data {

/// Slice data: 3-metric h_ab (6 components, sym3) and extrinsic curvature
/// K_ab (6 components), both on the same grid.
struct GeometricData {
    Field h;
    Field K;
};

struct MatterData {
    Field z;  ///< energy density source, 1 component
    Field j;  ///< momentum density, 3 components
};

/// Throws NotPositiveDefinite at the first failing point.
void check_positive_definite(const Field& h);

/// Harmonic-gauge completion of slice data into (g, d_t g):
///   g00 = -1, g0a = 0, g_ab = h_ab, d_t g_ab = -2 K_ab,
///   d_t g00 = 2 h^{ab} K_ab,
///   d_t g0c = h^{ab} d_a h_bc - 1/2 h^{ab} d_c h_ab.
/// Spatial derivatives are the grid's finite differences, so F^mu vanishes on
/// the slice to roundoff when evaluated with the same operators.
struct SliceCompletion {
    Field g;    // 10 components
    Field dtg;  // 10 components
};
SliceCompletion complete_gauge_data(const GeometricData& geo);

/// Hamiltonian and momentum constraint residuals:
///   R(h) - K_ab K^{ab} + (h^{ab} K_ab)^2 - 16 pi z
///   nabla_b K^{ab} - nabla^a (h^{bc} K_bc) + 8 pi j^a
struct ConstraintResiduals {
    Field hamiltonian;  // 1 component
    Field momentum;     // 3 components
};
ConstraintResiduals constraint_residuals(const GeometricData& geo, const MatterData& matter);

/// 3-dimensional scalar curvature of h by finite differences (oracle for the
/// Hamiltonian residual and reusable on its own).
Field scalar_curvature3(const Field& h);

/// Matter sources compatible with fluid data on the slice. With
/// printed_variant = false (default): z = w^beta (1 + (1+K w^2) h_ab ub^a ub^b),
/// the double normal projection of the stress tensor. printed_variant = true
/// selects z = w^beta (1 + (1+K w^2)) h_ab ub^a ub^b instead.
/// j^a = w^beta (1+K w^2) ub^a sqrt(1 + h_bc ub^b ub^c) in both readings.
MatterData compatibility_map(const Field& w, const Field& ubar, const Field& h,
                             const EquationOfState& eos, bool printed_variant = false);

/// u^0 on the slice such that the four-velocity is normalized for the slice
/// metric: u^0 = sqrt(1 + h_ab ub^a ub^b). Returns a 4-component field.
Field slice_four_velocity(const Field& ubar, const Field& h);

/// Smooth compactly supported regularization w -> chi_M (mollify(w) + rho):
/// strictly positive on |x| <= M (for rho > 0), zero for |x| >= M+1, and with
/// smooth beta-th power. mollifier_width = 0 picks 4x the grid spacing;
/// a negative width skips the discrete mollifier (for smooth profiles).
Field regularize_initial(const Field& w0, double rho, double M, double mollifier_width = 0.0);

/// Smooth cutoff: 1 on |x| <= M, 0 on |x| >= M+1.
double chi_cutoff(double r, double M);

}  // namespace initial_data
}  // namespace gravfluid
