#pragma once

#include <cmath>

#include "gravfluid/errors.hpp"

namespace gravfluid {

/// Polytropic-type equation of state p = K eps^gamma with the Makino change
/// of density variable w = eps^((gamma-1)/2).
struct EquationOfState {
    double K = 1.0;
    double gamma = 2.0;

    EquationOfState() = default;
    EquationOfState(double K_, double gamma_) : K(K_), gamma(gamma_) { validate(); }

    void validate() const {
        if (!(K > 0.0)) throw ValidationError("eos.K", "polytropic constant must be positive");
        if (!(gamma > 1.0)) throw ValidationError("eos.gamma", "adiabatic exponent must exceed 1");
    }

    /// beta = 2/(gamma-1), the exponent in eps = w^beta.
    double beta() const { return 2.0 / (gamma - 1.0); }

    double pressure(double eps) const { return K * std::pow(eps, gamma); }

    /// sigma = sqrt(gamma K) w, the sound speed as a function of w.
    double sound_speed(double w) const { return std::sqrt(gamma * K) * w; }

    /// kappa = (2/(gamma-1)) sqrt(K gamma) / (1 + K w^2).
    double kappa(double w) const { return kappa0() / (1.0 + K * w * w); }
    double kappa0() const { return beta() * std::sqrt(K * gamma); }

    /// kappa(w)/kappa(0) = 1/(1 + K w^2); exactly 1 at w = 0.
    double kappa_ratio(double w) const { return 1.0 / (1.0 + K * w * w); }
};

/// w = eps^((gamma-1)/2); monotone, w(0) = 0.
inline double makino_forward(double eps, const EquationOfState& eos) {
    if (eps < 0.0) throw NegativeDensity();
    return std::pow(eps, 0.5 * (eos.gamma - 1.0));
}

/// eps = w^(2/(gamma-1)).
inline double makino_inverse(double w, const EquationOfState& eos) {
    if (w < 0.0) throw NegativeMakino();
    return std::pow(w, eos.beta());
}

inline double sound_speed(double w, const EquationOfState& eos) { return eos.sound_speed(w); }
inline double kappa_factor(double w, const EquationOfState& eos) { return eos.kappa(w); }

}  // namespace gravfluid
