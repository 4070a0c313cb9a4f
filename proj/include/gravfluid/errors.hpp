#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravfluid {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMetric : Error {
    std::size_t point;
    explicit SingularMetric(std::size_t p)
        : Error("singular metric at point " + std::to_string(p)), point(p) {}
};

struct SingularLapse : Error {
    std::size_t point;
    explicit SingularLapse(std::size_t p)
        : Error("|g^00| below threshold at point " + std::to_string(p)), point(p) {}
};

struct NegativeDensity : Error {
    NegativeDensity() : Error("energy density must be nonnegative") {}
};

struct NegativeMakino : Error {
    NegativeMakino() : Error("Makino variable must be nonnegative") {}
};

struct NotNormalized : Error {
    explicit NotNormalized(double residual)
        : Error("four-velocity not normalized, g(u,u)+1 = " + std::to_string(residual)) {}
};

struct CausalityViolation : Error {
    explicit CausalityViolation(double sigma2)
        : Error("sound speed violates causality, sigma^2 = " + std::to_string(sigma2)) {}
};

struct NonHyperbolic : Error {
    using Error::Error;
};

struct IndefiniteA0 : Error {
    double min_eig;
    std::size_t point;
    IndefiniteA0(double e, std::size_t p)
        : Error("A0 not positive definite (min eig " + std::to_string(e) +
                " at point " + std::to_string(p) + ")"),
          min_eig(e), point(p) {}
};

struct IndefiniteWeight : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    std::size_t point;
    explicit NotPositiveDefinite(std::size_t p)
        : Error("3-metric not positive definite at point " + std::to_string(p)), point(p) {}
};

struct NonUniformGrid : Error {
    NonUniformGrid() : Error("operation requires a uniform periodic grid") {}
};

struct TailNotConverged : Error {
    int jmax;
    explicit TailNotConverged(int j)
        : Error("dyadic shell sum tail not converged at j_max = " + std::to_string(j)), jmax(j) {}
};

struct CflViolation : Error {
    CflViolation(double dt, double limit)
        : Error("dt = " + std::to_string(dt) + " exceeds CFL limit " + std::to_string(limit)) {}
};

struct NonFinite : Error {
    double t;
    std::size_t point;
    int component;
    NonFinite(double time, std::size_t p, int c)
        : Error("non-finite value at t = " + std::to_string(time) + ", point " +
                std::to_string(p) + ", component " + std::to_string(c)),
          t(time), point(p), component(c) {}
};

struct LapseCollapse : Error {
    explicit LapseCollapse(double u0)
        : Error("u^0 = " + std::to_string(u0) + " below transport threshold") {}
};

struct ParseError : Error {
    int line;
    ParseError(int l, const std::string& msg)
        : Error("parse error at line " + std::to_string(l) + ": " + msg), line(l) {}
};

struct ValidationError : Error {
    std::string field;
    ValidationError(const std::string& f, const std::string& constraint)
        : Error("invalid scenario field '" + f + "': " + constraint), field(f) {}
};

}  // namespace gravfluid
