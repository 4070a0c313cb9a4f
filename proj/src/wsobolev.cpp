#include "gravfluid/wsobolev.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <mutex>
#include <random>

#include "gravfluid/fluid.hpp"
#include "gravfluid/reduction.hpp"

namespace gravfluid {
namespace wsobolev {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double fa = std::exp(-1.0 / u);
    const double fb = std::exp(-1.0 / (1.0 - u));
    return fa / (fa + fb);
}

}  // namespace

double DyadicFamily::psi(int j, double r) {
    if (j == 0) return 1.0 - smoothstep(r - 1.0);
    const double lo = std::ldexp(1.0, j - 2);  // 2^{j-2}
    const double hi = std::ldexp(1.0, j);      // 2^j
    return smoothstep((r - lo) / lo) * (1.0 - smoothstep((r - hi) / hi));
}

double DyadicFamily::psi_pow(int j, double r, double gamma_psi) {
    const double v = psi(j, r);
    if (gamma_psi == 1.0) return v;
    if (gamma_psi == 2.0) return v * v;
    return v > 0.0 ? std::pow(v, gamma_psi) : 0.0;
}

// ---------------------------------------------------------------------------
// FFT box

struct NormEngine::Impl {
    int dim;
    int N;
    double L = 8.0;
    std::size_t total;
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_bwd = nullptr;
    std::vector<double> xi2;  // |xi|^2 per flattened box index

    Impl(int dim_, int N_) : dim(dim_), N(N_), total(1) {
        for (int d = 0; d < dim; ++d) total *= std::size_t(N);
        std::vector<std::complex<double>> scratch(total);
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        std::vector<int> dims(dim, N);
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_fwd = fftw_plan_dft(dim, dims.data(), ptr, ptr, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        plan_bwd = fftw_plan_dft(dim, dims.data(), ptr, ptr, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);

        xi2.resize(total);
        for (std::size_t p = 0; p < total; ++p) {
            std::size_t rem = p;
            double acc = 0.0;
            for (int d = dim - 1; d >= 0; --d) {
                const int n = int(rem % N);
                rem /= N;
                const int k = n <= N / 2 ? n : n - N;
                const double xi = 2.0 * M_PI * k / L;
                acc += xi * xi;
            }
            xi2[p] = acc;
        }
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_fwd);
        fftw_destroy_plan(plan_bwd);
    }

    void fft(std::complex<double>* buf, bool forward) const {
        auto* ptr = reinterpret_cast<fftw_complex*>(buf);
        fftw_execute_dft(forward ? plan_fwd : plan_bwd, ptr, ptr);
    }

    double coord(int n) const { return -0.5 * L + n * (L / N); }

    std::array<double, 3> box_point(std::size_t p) const {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        std::size_t rem = p;
        for (int d = dim - 1; d >= 0; --d) {
            x[d] = coord(int(rem % N));
            rem /= N;
        }
        return x;
    }

    double cell_volume() const { return std::pow(L / N, dim); }
};

NormEngine::NormEngine(int dim, int box_points)
    : impl_(std::make_unique<Impl>(dim, box_points)), dim_(dim), boxn_(box_points) {
    if (dim < 1 || dim > 3) throw Error("norm engine dimension must be 1, 2 or 3");
}

NormEngine::~NormEngine() = default;

namespace {

/// Fill the box with (psi_j^gamma u_c)(2^j x); returns max |value|.
double fill_shell(const NormEngine::Impl& b, const Sampler& u, int c, int j, double gamma_psi,
                  std::complex<double>* buf) {
    const double scale = std::ldexp(1.0, j);
    double mx = 0.0;
    for (std::size_t p = 0; p < b.total; ++p) {
        auto x = b.box_point(p);
        double r2 = 0.0;
        for (int d = 0; d < b.dim; ++d) {
            x[d] *= scale;
            r2 += x[d] * x[d];
        }
        const double window = DyadicFamily::psi_pow(j, std::sqrt(r2), gamma_psi);
        double val = 0.0;
        if (window != 0.0) val = window * u.eval(x, c);
        buf[p] = val;
        mx = std::max(mx, std::abs(val));
    }
    return mx;
}

}  // namespace

std::vector<double> NormEngine::shell_terms(const Sampler& u, const NormSpec& spec,
                                            const DyadicFamily& fam) const {
    spec.validate();
    const auto& b = *impl_;
    std::vector<std::complex<double>> buf(b.total);
    std::vector<double> terms(fam.jmax + 1, 0.0);
    for (int j = 0; j <= fam.jmax; ++j) {
        if (u.support_radius > 0.0 && j >= 1 && std::ldexp(1.0, j - 2) > u.support_radius)
            continue;  // window misses the support entirely
        const double weight = std::pow(2.0, (0.5 * b.dim + spec.delta) * 2.0 * j);
        double term = 0.0;
        for (int c = 0; c < u.ncomp; ++c) {
            if (fill_shell(b, u, c, j, spec.gamma_psi, buf.data()) == 0.0) continue;
            b.fft(buf.data(), true);
            double acc = 0.0;
            for (std::size_t p = 0; p < b.total; ++p)
                acc += std::pow(1.0 + b.xi2[p], spec.s) * std::norm(buf[p]);
            term += acc * b.cell_volume() / double(b.total);
        }
        terms[j] = weight * term;
    }
    return terms;
}

double NormEngine::norm_hs_delta(const Sampler& u, const NormSpec& spec,
                                 const DyadicFamily& fam) const {
    const auto terms = shell_terms(u, spec, fam);
    double total = 0.0;
    for (double t : terms) total += t;
    if (total > 0.0 && terms.back() > kTailThreshold * total)
        throw TailNotConverged(fam.jmax);
    return std::sqrt(total);
}

double NormEngine::weighted_block_norm_sq(
    const Sampler& u, const NormSpec& spec,
    const std::function<void(const std::array<double, 3>&, double*)>& weight, int nblock,
    const DyadicFamily& fam) const {
    spec.validate();
    const auto& b = *impl_;
    const int ngroups = u.ncomp / nblock;
    std::vector<std::vector<std::complex<double>>> lf(nblock);
    for (auto& v : lf) v.resize(b.total);
    std::vector<double> wmat(nblock * nblock);

    double total = 0.0;
    for (int j = 0; j <= fam.jmax; ++j) {
        if (u.support_radius > 0.0 && j >= 1 && std::ldexp(1.0, j - 2) > u.support_radius)
            continue;
        const double scale = std::ldexp(1.0, j);
        const double shell_weight = std::pow(2.0, (0.5 * b.dim + spec.delta) * 2.0 * j);
        double term = 0.0;
        for (int g = 0; g < ngroups; ++g) {
            bool nonzero = false;
            for (int bl = 0; bl < nblock; ++bl) {
                const int c = bl * ngroups + g;
                if (fill_shell(b, u, c, j, spec.gamma_psi, lf[bl].data()) > 0.0) nonzero = true;
            }
            if (!nonzero) continue;
            // Lambda^s into physical space per block component
            for (int bl = 0; bl < nblock; ++bl) {
                b.fft(lf[bl].data(), true);
                for (std::size_t p = 0; p < b.total; ++p)
                    lf[bl][p] *= std::pow(1.0 + b.xi2[p], 0.5 * spec.s) / double(b.total);
                b.fft(lf[bl].data(), false);
            }
            for (std::size_t p = 0; p < b.total; ++p) {
                auto x = b.box_point(p);
                for (int d = 0; d < b.dim; ++d) x[d] *= scale;
                weight(x, wmat.data());
                double acc = 0.0;
                for (int bl = 0; bl < nblock; ++bl)
                    for (int bl2 = 0; bl2 < nblock; ++bl2)
                        acc += wmat[bl * nblock + bl2] * lf[bl][p].real() * lf[bl2][p].real();
                term += acc;
            }
        }
        total += shell_weight * term * b.cell_volume();
    }
    return total;
}

// ---------------------------------------------------------------------------
// samplers and plain weighted L2

Sampler sampler_from_field(const Field& f, bool clamp_outside) {
    const GridSpec grid = f.grid();
    std::vector<int> axes;
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) axes.push_back(a);

    Sampler s;
    s.dim = int(axes.size());
    s.ncomp = f.ncomp();
    double rad = 0.0;
    for (int a : axes) rad = std::max(rad, 0.5 * grid.extent[a]);
    s.support_radius = clamp_outside ? 0.0 : rad * std::sqrt(double(axes.size())) + 1e-12;

    // copy so the sampler owns its data
    auto data = std::make_shared<Field>(f);
    s.eval = [data, axes, grid, clamp_outside](const std::array<double, 3>& x,
                                               int c) -> double {
        int idx0[3] = {0, 0, 0};
        double frac[3] = {0.0, 0.0, 0.0};
        bool active_axis[3] = {false, false, false};
        for (std::size_t d = 0; d < axes.size(); ++d) {
            const int a = axes[d];
            active_axis[a] = true;
            double t = (x[d] + 0.5 * grid.extent[a]) / grid.spacing(a);
            const double tmax =
                grid.n[a] - 1 + (grid.boundary == BoundaryMode::Periodic ? 1 : 0);
            if (t < 0.0 || t > tmax) {
                if (!clamp_outside) return 0.0;
                t = std::clamp(t, 0.0, double(grid.n[a] - 1));
            }
            int i0 = int(std::floor(t));
            double fr = t - i0;
            if (i0 >= grid.n[a]) {
                i0 = grid.n[a] - 1;
                fr = 1.0;
            }
            idx0[a] = i0;
            frac[a] = fr;
        }
        double acc = 0.0;
        const int corners = 1 << axes.size();
        for (int corner = 0; corner < corners; ++corner) {
            double wgt = 1.0;
            int ii[3] = {idx0[0], idx0[1], idx0[2]};
            int bit = 0;
            for (int a = 0; a < 3; ++a) {
                if (!active_axis[a]) continue;
                const bool hi = corner & (1 << bit);
                ++bit;
                wgt *= hi ? frac[a] : 1.0 - frac[a];
                if (hi) {
                    ii[a] = idx0[a] + 1;
                    if (ii[a] >= grid.n[a])
                        ii[a] = grid.boundary == BoundaryMode::Periodic ? 0 : grid.n[a] - 1;
                }
            }
            if (wgt != 0.0) acc += wgt * data->at(grid.index(ii[0], ii[1], ii[2]), c);
        }
        return acc;
    };
    return s;
}

Field bessel_potential(const Field& u, double s) {
    const GridSpec& grid = u.grid();
    if (grid.boundary != BoundaryMode::Periodic) throw NonUniformGrid();

    std::vector<int> dims;
    std::vector<double> extents;
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) {
            dims.push_back(grid.n[a]);
            extents.push_back(grid.extent[a]);
        }
    if (dims.empty()) throw NonUniformGrid();

    std::size_t total = 1;
    for (int d : dims) total *= std::size_t(d);
    std::vector<std::complex<double>> buf(total);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft(int(dims.size()), dims.data(), ptr, ptr, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_dft(int(dims.size()), dims.data(), ptr, ptr, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    // |xi|^2 per flattened index of the active-axis box
    std::vector<double> xi2(total);
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rem = p;
        double acc = 0.0;
        for (int d = int(dims.size()) - 1; d >= 0; --d) {
            const int n = int(rem % dims[d]);
            rem /= dims[d];
            const int k = n <= dims[d] / 2 ? n : n - dims[d];
            const double xi = 2.0 * M_PI * k / extents[d];
            acc += xi * xi;
        }
        xi2[p] = acc;
    }

    Field out(grid, u.ncomp());
    for (int c = 0; c < u.ncomp(); ++c) {
        for (std::size_t p = 0; p < total; ++p) buf[p] = u.at(p, c);
        fftw_execute_dft(fwd, ptr, ptr);
        for (std::size_t p = 0; p < total; ++p)
            buf[p] *= std::pow(1.0 + xi2[p], 0.5 * s) / double(total);
        fftw_execute_dft(bwd, ptr, ptr);
        for (std::size_t p = 0; p < total; ++p) out.at(p, c) = buf[p].real();
    }
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return out;
}

double norm_l2_delta(const Sampler& u, double delta, double radius, int quad_points) {
    const double h = 2.0 * radius / quad_points;
    double acc = 0.0;
    std::array<int, 3> q{1, 1, 1};
    for (int d = 0; d < u.dim; ++d) q[d] = quad_points;
    for (int i = 0; i < q[0]; ++i)
        for (int j = 0; j < q[1]; ++j)
            for (int k = 0; k < q[2]; ++k) {
                std::array<double, 3> x{0.0, 0.0, 0.0};
                const int idx[3] = {i, j, k};
                double r2 = 0.0;
                for (int d = 0; d < u.dim; ++d) {
                    x[d] = -radius + (idx[d] + 0.5) * h;
                    r2 += x[d] * x[d];
                }
                double ssq = 0.0;
                for (int c = 0; c < u.ncomp; ++c) {
                    const double v = u.eval(x, c);
                    ssq += v * v;
                }
                acc += std::pow(1.0 + std::sqrt(r2), 2.0 * delta) * ssq;
            }
    return std::sqrt(acc * std::pow(h, u.dim));
}

double norm_l2_delta_field(const Field& u, double delta) {
    const GridSpec& grid = u.grid();
    double dv = 1.0;
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) dv *= grid.spacing(a);
    double acc = 0.0;
    for (std::size_t p = 0; p < u.npoints(); ++p) {
        const auto x = grid.point(p);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a)
            if (grid.active(a)) r2 += x[a] * x[a];
        double ssq = 0.0;
        for (int c = 0; c < u.ncomp(); ++c) ssq += u.at(p, c) * u.at(p, c);
        acc += std::pow(1.0 + std::sqrt(r2), 2.0 * delta) * ssq;
    }
    return std::sqrt(acc * dv);
}

// ---------------------------------------------------------------------------
// energy norms

EnergyWeights identity_weights() { return EnergyWeights{Field(), Field(), true}; }

EnergyWeights weights_from_state(const Field& U, const EquationOfState& eos) {
    EnergyWeights w;
    w.identity = false;
    w.a33 = Field(U.grid(), 6);
    w.a44 = Field(U.grid(), 15);
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        const auto ps = reduction::decode(U.point(p), eos, p);
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                w.a33.at(p, sym3(a, b)) = ps.m * ps.gi[sym4(a + 1, b + 1)];
        const auto A = fluid::fluid_matrices_scaled(ps.fluid_view());
        int c = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) w.a44.at(p, c++) = A[0][i][j];

        Eigen::Matrix3d M3;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) M3(a, b) = w.a33.at(p, sym3(a, b));
        Eigen::Matrix<double, 5, 5> M5;
        c = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) {
                M5(i, j) = M5(j, i) = w.a44.at(p, c++);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> e3(M3, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> e5(M5,
                                                                      Eigen::EigenvaluesOnly);
        if (e3.eigenvalues()[0] <= 0.0 || e5.eigenvalues()[0] <= 0.0)
            throw IndefiniteWeight("energy weight block not positive definite at point " +
                                   std::to_string(p));
    }
    return w;
}

namespace {

Sampler subrange_sampler(const Sampler& base, int begin, int count) {
    Sampler s = base;
    s.ncomp = count;
    auto eval = base.eval;
    s.eval = [eval, begin](const std::array<double, 3>& x, int c) {
        return eval(x, begin + c);
    };
    return s;
}

/// weight callback from a sym-packed weight field; clamped edge values extend
/// the coefficients beyond the truncated domain
std::function<void(const std::array<double, 3>&, double*)> weight_callback(const Field& wf,
                                                                           int nblock) {
    Sampler ws = sampler_from_field(wf, /*clamp_outside=*/true);
    return [ws, nblock](const std::array<double, 3>& x, double* out) {
        if (nblock == 3) {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) out[a * 3 + b] = ws.eval(x, sym3(a, b));
        } else {
            int c = 0;
            for (int i = 0; i < 5; ++i)
                for (int j = i; j < 5; ++j) {
                    const double v = ws.eval(x, c++);
                    out[i * 5 + j] = out[j * 5 + i] = v;
                }
        }
    };
}

}  // namespace

double energy_x_norm(const Field& U, const NormSpec& spec, const EnergyWeights& weights,
                     const NormEngine& engine) {
    const Sampler base = sampler_from_field(U);
    NormSpec sv{spec.s, spec.delta, 2.0};
    NormSpec sd{spec.s, spec.delta + 1.0, 2.0};
    NormSpec sw{spec.s + 1.0, spec.delta + 1.0, 2.0};

    const Sampler v = subrange_sampler(base, layout::v0, 10);
    const Sampler dtv = subrange_sampler(base, layout::dtv0, 10);
    const Sampler dxv = subrange_sampler(base, layout::dxv0, 30);
    const Sampler W = subrange_sampler(base, layout::w0, 5);

    auto unweighted_sq = [&](const Sampler& s, const NormSpec& ns) {
        const double n = engine.norm_hs_delta(s, ns);
        return n * n;
    };

    double total = unweighted_sq(v, sv) + unweighted_sq(dtv, sd);
    if (weights.identity) {
        total += unweighted_sq(dxv, sd) + unweighted_sq(W, sw);
    } else {
        total += engine.weighted_block_norm_sq(dxv, sd, weight_callback(weights.a33, 3), 3);
        total += engine.weighted_block_norm_sq(W, sw, weight_callback(weights.a44, 5), 5);
    }
    return std::sqrt(total);
}

double y_delta_norm(const Field& U, double delta, const EnergyWeights& weights) {
    const GridSpec& grid = U.grid();
    double dv = 1.0;
    for (int a = 0; a < 3; ++a)
        if (grid.active(a)) dv *= grid.spacing(a);
    double acc = 0.0;
    for (std::size_t p = 0; p < U.npoints(); ++p) {
        const auto x = grid.point(p);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a)
            if (grid.active(a)) r2 += x[a] * x[a];
        const double w0 = std::pow(1.0 + std::sqrt(r2), 2.0 * delta);
        const double w1 = w0 * (1.0 + std::sqrt(r2)) * (1.0 + std::sqrt(r2));

        const double* up = U.point(p);
        double sv = 0.0, sdt = 0.0;
        for (int s = 0; s < 10; ++s) {
            sv += up[layout::v0 + s] * up[layout::v0 + s];
            sdt += up[layout::dtv0 + s] * up[layout::dtv0 + s];
        }
        double sdx = 0.0, sW = 0.0;
        if (weights.identity) {
            for (int c = 0; c < 30; ++c) sdx += up[layout::dxv0 + c] * up[layout::dxv0 + c];
            for (int c = 0; c < 5; ++c) sW += up[layout::w0 + c] * up[layout::w0 + c];
        } else {
            for (int s = 0; s < 10; ++s)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        sdx += weights.a33.at(p, sym3(a, b)) * up[layout::dxv(a, s)] *
                               up[layout::dxv(b, s)];
            int c = 0;
            for (int i = 0; i < 5; ++i)
                for (int j = i; j < 5; ++j) {
                    const double wij = weights.a44.at(p, c++);
                    sW += (i == j ? 1.0 : 2.0) * wij * up[layout::w0 + i] * up[layout::w0 + j];
                }
        }
        acc += w0 * sv + w1 * (sdt + sdx + sW);
    }
    return std::sqrt(acc * dv);
}

// ---------------------------------------------------------------------------
// inequality suite
// (implemented in a separate translation unit section below)

double SuiteReport::worst_ratio(const std::string& inequality) const {
    double w = 0.0;
    for (const auto& r : rows)
        if (r.inequality == inequality) w = std::max(w, r.ratio);
    return w;
}

void write_suite_csv(const SuiteReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(12);
    out << "inequality,member,lhs,rhs,ratio\n";
    for (const auto& r : report.rows)
        out << r.inequality << "," << r.member << "," << r.lhs << "," << r.rhs << "," << r.ratio
            << "\n";
    out << "overall,pass," << (report.pass ? 1 : 0) << ",,\n";
}

}  // namespace wsobolev
}  // namespace gravfluid
