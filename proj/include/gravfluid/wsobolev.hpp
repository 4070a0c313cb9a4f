#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gravfluid/eos.hpp"
#include "gravfluid/field.hpp"

namespace gravfluid {
namespace wsobolev {

/// Smooth radial cutoffs: psi_0 = 1 on |x|<=1 with support in |x|<=2;
/// psi_j = 1 on [2^{j-1}, 2^j] with support in [2^{j-2}, 2^{j+1}].
struct DyadicFamily {
    int jmax = 8;

    static double psi(int j, double r);
    static double psi_pow(int j, double r, double gamma_psi);
};

struct NormSpec {
    double s = 2.0;
    double delta = 0.0;
    double gamma_psi = 1.0;

    void validate() const {
        if (s < 0.0 || s > 6.0)
            throw ValidationError("norm.s", "regularity must lie in [0, 6]");
        if (gamma_psi <= 0.0)
            throw ValidationError("norm.gamma_psi", "cutoff power must be positive");
    }
};

/// Point sampler for a (possibly vector-valued) function on R^dim. Suppressed
/// coordinates are passed as zero. support_radius <= 0 means unknown.
struct Sampler {
    int dim = 3;
    int ncomp = 1;
    double support_radius = 0.0;
    std::function<double(const std::array<double, 3>&, int)> eval;
};

/// Multilinear interpolation of a grid field. Outside the domain the sampler
/// returns zero (compact-support reading, the default) or the clamped edge
/// value (used for coefficient fields that tend to constants).
Sampler sampler_from_field(const Field& f, bool clamp_outside = false);

/// Relative size the last shell may have before the truncated sum is rejected.
inline constexpr double kTailThreshold = 1e-10;

/// H_{s,delta} norms on a fixed reference box [-4,4]^dim: every dyadic shell
/// is rescaled onto the box, windowed, and measured through the discrete
/// Bessel multiplier (1+|xi|^2)^{s/2}.
class NormEngine {
  public:
    NormEngine(int dim, int box_points);
    ~NormEngine();
    NormEngine(const NormEngine&) = delete;
    NormEngine& operator=(const NormEngine&) = delete;

    int dim() const { return dim_; }
    int box_points() const { return boxn_; }

    /// Truncated shell sum; throws TailNotConverged when the last shell
    /// exceeds kTailThreshold times the partial sum.
    double norm_hs_delta(const Sampler& u, const NormSpec& spec,
                         const DyadicFamily& fam = {}) const;

    /// Shell-wise contributions (squared), for diagnostics.
    std::vector<double> shell_terms(const Sampler& u, const NormSpec& spec,
                                    const DyadicFamily& fam = {}) const;

    /// Norm of a matrix-weighted block: sum_j w_j <L^s f, A(2^j x) L^s f>.
    /// `weight` returns the symmetric nblock x nblock matrix at a physical
    /// point, packed row-major; identity when empty.
    double weighted_block_norm_sq(
        const Sampler& u, const NormSpec& spec,
        const std::function<void(const std::array<double, 3>&, double*)>& weight,
        int nblock, const DyadicFamily& fam = {}) const;

    struct Impl;

  private:
    std::unique_ptr<Impl> impl_;
    int dim_;
    int boxn_;
};

/// Discrete Bessel potential on the field's own grid (periodic, uniform).
Field bessel_potential(const Field& u, double s);

/// Weighted L2 norm of a sampler by midpoint quadrature over [-R,R]^dim.
double norm_l2_delta(const Sampler& u, double delta, double radius, int quad_points);

/// Weighted L2 norm of a grid field by grid quadrature.
double norm_l2_delta_field(const Field& u, double delta);

/// A0-weighted blocks used by the energy inner products.
struct EnergyWeights {
    Field a33;  ///< 6 components (sym3): the 3x3 wave-block weight
    Field a44;  ///< 15 components (sym5 row-major upper): the fluid weight
    bool identity = true;
};
EnergyWeights identity_weights();
EnergyWeights weights_from_state(const Field& U, const EquationOfState& eos);

/// The X_{s,delta} energy norm of the coupled state:
/// ||v||_{s,d} + ||dtv||_{s,d+1} + ||dxv||_{s,d+1,a33} + ||W||_{s+1,d+1,a44},
/// all with gamma_psi = 2 windows. Identity weights give the plain X norm.
double energy_x_norm(const Field& U, const NormSpec& spec, const EnergyWeights& weights,
                     const NormEngine& engine);

/// Weighted L2-product norm of Y_delta with the A0 blocks of `weights`,
/// by grid quadrature (no Fourier machinery).
double y_delta_norm(const Field& U, double delta, const EnergyWeights& weights);

/// One measured inequality instance.
struct SuiteRow {
    std::string inequality;
    std::string member;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;
    std::vector<std::string> failures;
    bool pass = true;

    double worst_ratio(const std::string& inequality) const;
};

/// Empirical checks of the norm-calculus inequalities on named test-function
/// families. Asserted bands are frozen in code; everything is also written to
/// the report for regression tracking.
SuiteReport check_inequality_suite(const EquationOfState& eos);

void write_suite_csv(const SuiteReport& report, const std::string& path);

}  // namespace wsobolev
}  // namespace gravfluid
