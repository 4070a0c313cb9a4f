#pragma once

#include <vector>

#include "gravfluid/eos.hpp"
#include "gravfluid/field.hpp"
#include "gravfluid/wsobolev.hpp"

namespace gravfluid {
namespace evolve {

enum class Mode { Direct, Picard };

struct EvolutionConfig {
    double dt = 0.0;  ///< 0 picks cfl * h / v_max
    double t_end = 1.0;
    double cfl = 0.4;
    Mode mode = Mode::Direct;
    int picard_iters = 6;
    int monitor_every = 10;
    bool freeze_metric = false;        ///< evolve the fluid on a frozen metric
    bool signature_check_each_step = false;
    double u0_min = 0.5;               ///< transport guard on u^0
};

struct MonitorRecord {
    double t = 0.0;
    double energy_x = 0.0;
    double norm_drift = 0.0;          ///< sup |g u u + 1| over the safe interior
    double harmonic_residual = 0.0;   ///< sup |F^mu|
    double eps_consistency = 0.0;     ///< sup |eps - w^beta| (Picard mode)
    double a0_min_eig = 0.0;
};

/// One explicit RK4 step of A^0 d_t U = (A^a + C^a) d_a U + B(...) + F.
Field step_direct(const Field& U, const EquationOfState& eos, double dt,
                  bool freeze_metric = false);

/// Cells to exclude near a frozen boundary after evolving for time t
/// (domain of dependence at unit speed plus the stencil halo).
int interior_margin(const GridSpec& grid, double t);

struct RunResult {
    Field state;
    std::vector<MonitorRecord> monitors;
    double dt_used = 0.0;
    int steps = 0;
};

/// Monitored direct-mode evolution. Throws CflViolation when cfg.dt exceeds
/// the measured limit, NonFinite on NaN/Inf, IndefiniteA0 when a block solve
/// loses positivity.
RunResult run(const Field& U0, const EquationOfState& eos, const EvolutionConfig& cfg,
              const wsobolev::NormSpec& nspec, const wsobolev::NormEngine& engine);

/// Stored step trajectory with linear interpolation in t.
struct Trajectory {
    double dt = 0.0;
    std::vector<Field> states;

    double t_end() const { return dt * double(states.size() - 1); }
    Field at(double t) const;
    static Trajectory constant(const Field& U0, double dt, int steps);
};

/// One Picard sweep: solve the linear system with coefficients frozen on
/// `prev`, initial data U0, same stepper, same step count.
Trajectory picard_iterate(const Trajectory& prev, const Field& U0, const EquationOfState& eos);

/// Characteristic transport coefficients for one step (endpoints in time).
struct TransportCoeffs {
    Field b0, b1;  ///< 3-component advection velocity u^a/u^0 at t and t+dt
    Field c0, c1;  ///< scalar source at t and t+dt
};

/// Departure-point semi-Lagrangian step of d_t eps + b_a d_a eps + c = 0.
Field transport_epsilon(const Field& eps, const TransportCoeffs& co, double dt);

struct PicardResult {
    std::vector<double> diff_sup;  ///< sup_t ||U^{k+1}-U^k||_{Y_delta,A0}
    std::vector<double> ratios;    ///< consecutive quotients of diff_sup
    Field state;                   ///< last iterate at t = T
    Field eps;                     ///< transported epsilon at t = T
    double eps_consistency = 0.0;  ///< sup |eps - w^beta| at t = T
    Trajectory trajectory;
    std::vector<Field> eps_trajectory;
};

/// Full Picard mode: iterate sweeps from the constant-in-time seed, with the
/// epsilon characteristic transport riding along each sweep.
PicardResult picard_run(const Field& U0, const EquationOfState& eos, double T, double dt,
                        int iters, double delta, double u0_min = 0.5);

struct GronwallFit {
    double c_bound = 0.0;  ///< smallest C with E <= (E0+1)e^{Ct} - 1 on the series
    double c_ls = 0.0;     ///< least-squares slope of log(E+1)
    double slack = 0.0;    ///< max bound violation, relative (0 by construction)
    bool pass = false;
};

/// Fit on a (t, E) series; needs >= 10 samples for a PASS verdict.
GronwallFit gronwall_check(const std::vector<std::pair<double, double>>& series);

}  // namespace evolve
}  // namespace gravfluid
