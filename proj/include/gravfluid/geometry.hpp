#pragma once

#include <array>

#include "gravfluid/field.hpp"

namespace gravfluid {
namespace geometry {

/// Pointwise kernels on symmetric 4x4 tensors in sym4 packing. `dg[nu]`
/// always means the full derivative set: dg[0] is the evolved time
/// derivative, dg[1..3] are spatial derivatives.
namespace point {

/// Inverse of a symmetric 4x4 metric; returns det(g).
double invert(const double g[10], double gi[10]);

/// Christoffel symbols of the first kind, G1[eps][sym4(a,b)].
void christoffel_first(const std::array<std::array<double, 10>, 4>& dg,
                       double G1[4][10]);

/// Christoffel symbols of the second kind from the inverse metric.
void christoffel_second(const double gi[10], const double G1[4][10], double G2[4][10]);

/// Harmonic gauge functional F^mu = g^{bg} Gamma^mu_{bg}.
void gauge_functional(const double gi[10], const double G2[4][10], double F[4]);

/// Quadratic remainder H_ab = g^{mn} d_m d_n g_ab + 2 R_ab in harmonic gauge,
/// written in closed form (quadratic in dg, rational in g).
void quadratic_remainder(const double gi[10],
                         const std::array<std::array<double, 10>, 4>& dg,
                         double H[10]);

/// Polarization of the quadratic remainder: bilinear form with
/// Hbil(dg, dg) == quadratic_remainder(dg) exactly.
void quadratic_remainder_bilinear(const double gi[10],
                                  const std::array<std::array<double, 10>, 4>& dgA,
                                  const std::array<std::array<double, 10>, 4>& dgB,
                                  double H[10]);

/// Eigenvalue signs of g must be (-,+,+,+).
bool lorentzian_signature(const double g[10]);

}  // namespace point

/// Grid-level operations. Metric fields carry 10 components (sym4), vector
/// fields 4. Spatial derivatives come from the grid's finite differences; the
/// time derivative is always a supplied field, never differenced history.
Field invert_metric(const Field& g);

/// Gamma^mu_{bg} as a 40-component field, mu-major over sym4(b,g).
Field christoffel(const Field& g, const Field& dtg);

struct TimeDerivs {
    Field dtg;   ///< d_t g_ab
    Field dttg;  ///< d_t d_t g_ab
};

/// Ricci tensor by finite differences throughout: validation oracle only.
Field ricci_oracle(const Field& g, const TimeDerivs& td);

Field lower_index(const Field& u, const Field& g);
Field raise_index(const Field& xi, const Field& g);

/// F^mu on the grid.
Field harmonic_residual(const Field& g, const Field& dtg);

/// Throws SingularMetric / Error if any sampled point fails the (-,+,+,+)
/// eigenvalue sign check. `stride` samples every stride-th point.
void check_signature(const Field& g, std::size_t stride = 1);

}  // namespace geometry
}  // namespace gravfluid
