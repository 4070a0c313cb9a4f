#pragma once

#include <array>

#include "gravfluid/eos.hpp"
#include "gravfluid/field.hpp"

namespace gravfluid {
namespace fluid {

/// Causality margin: states with sigma^2 > 1 - this are rejected.
inline constexpr double kCausalityMargin = 1e-10;

/// Pointwise fluid algebra. Velocities are contravariant u^a; the metric and
/// its inverse come packed in sym4 order.
struct PointFluid {
    double g[10];
    double gi[10];
    double u[4];   ///< u^alpha
    double ulo[4]; ///< u_alpha
    double w = 0.0;
    EquationOfState eos;

    /// Builds derived quantities; throws CausalityViolation when
    /// sigma^2 >= 1 - margin, NotNormalized when |g(u,u)+1| > norm_tol
    /// (norm_tol < 0 skips the check). Past-directed u (u^0 <= 0) is rejected.
    static PointFluid make(const double g[10], const double gi[10], const double u[4],
                           double w, const EquationOfState& eos, double norm_tol = 1e-8);

    double sigma() const { return eos.sound_speed(w); }
    double kappa() const { return eos.kappa(w); }

    /// Mixed projection P^nu_alpha = delta + u^nu u_alpha (nu row).
    double P(int nu, int alpha) const { return (nu == alpha ? 1.0 : 0.0) + u[nu] * ulo[alpha]; }
    /// Rest-space reflection Gamma_ab = g_ab + 2 u_a u_b.
    double refl(int a, int b) const { return g[sym4(a, b)] + 2.0 * ulo[a] * ulo[b]; }
    /// Gamma^{ab} = g^{ab} + 2 u^a u^b.
    double refl_up(int a, int b) const { return gi[sym4(a, b)] + 2.0 * u[a] * u[b]; }

    double norm_residual() const;
};

using Mat5 = std::array<std::array<double, 5>, 5>;

/// The four 5x5 symmetric coefficient matrices of the symmetrized fluid
/// system, unknowns (w, u^beta). A[nu] multiplies nabla_nu.
std::array<Mat5, 4> fluid_matrices(const PointFluid& f);

/// Same blocks conjugated by diag(1/kappa0, 1,..): the w-slot carries
/// kappa0*w so that the nu=0 block is exactly the identity at (w,u) = (0,e0).
std::array<Mat5, 4> fluid_matrices_scaled(const PointFluid& f);

/// Lower-order vector from expanding nabla = d + Gamma in the fluid system:
/// l = (sigma kappa P^nu_b Gamma^b_{nu m} u^m, Gamma_ab u^nu Gamma^b_{nu m} u^m).
/// G2 is the 40-component Christoffel set, mu-major.
std::array<double, 5> lower_order(const PointFluid& f, const double G2[4][10]);
std::array<double, 5> lower_order_scaled(const PointFluid& f, const double G2[4][10]);

/// Closed-form characteristic polynomial
/// Q(xi) = -kappa^2 det(g) (u.xi)^3 ((u.xi)^2 - sigma^2 P^a_b xi_a xi^b).
double characteristic_polynomial(const PointFluid& f, const double xi[4], double det_g);

struct TimelikeCheck {
    bool timelike;
    double margin;  ///< value of the sound-cone form (u.xi)^2 - sigma^2 P xi xi
};
TimelikeCheck check_timelike_covector(const PointFluid& f, const double xi[4]);

/// Five characteristic speeds in spatial direction n (unit covector),
/// from the generalized eigenproblem (A^a n_a) x = lambda A^0 x.
/// Throws NonHyperbolic if A^0 is not positive definite.
std::array<double, 5> characteristic_speeds(const PointFluid& f, const double n[3]);

/// Roots of Q(-lambda, n) = 0: the material speed (triple) and the two sound
/// cone speeds, used as an independent oracle for characteristic_speeds.
std::array<double, 5> characteristic_speeds_roots(const PointFluid& f, const double n[3]);

/// g_ab u^a u^b + 1 pointwise; u is a 4-component field.
Field normalization_drift(const Field& g, const Field& u);

}  // namespace fluid
}  // namespace gravfluid
