#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "gravfluid/errors.hpp"

namespace gravfluid {

enum class BoundaryMode { Periodic, FrozenExterior };

/// Uniform Cartesian grid, centered at the origin. Axes with a single point
/// are suppressed: fields are constant along them and derivatives vanish.
struct GridSpec {
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    BoundaryMode boundary = BoundaryMode::Periodic;
    int fd_order = 4;  // 2 or 4

    void validate() const;

    bool active(int axis) const { return n[axis] > 1; }
    int dim() const { return int(active(0)) + int(active(1)) + int(active(2)); }
    std::size_t npoints() const {
        return std::size_t(n[0]) * std::size_t(n[1]) * std::size_t(n[2]);
    }

    double spacing(int axis) const {
        if (!active(axis)) return 1.0;
        return boundary == BoundaryMode::Periodic ? extent[axis] / n[axis]
                                                  : extent[axis] / (n[axis] - 1);
    }
    double min_spacing() const;

    double coord(int axis, int i) const { return -0.5 * extent[axis] + i * spacing(axis); }
    std::array<double, 3> point(std::size_t p) const {
        auto [i, j, k] = unravel(p);
        return {coord(0, i), coord(1, j), coord(2, k)};
    }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * n[1] + j) * n[2] + k;
    }
    std::array<int, 3> unravel(std::size_t p) const {
        int k = int(p % n[2]);
        int j = int((p / n[2]) % n[1]);
        int i = int(p / (std::size_t(n[1]) * n[2]));
        return {i, j, k};
    }

    /// Index of the neighbor `shift` cells away along `axis`. Periodic wrap,
    /// or clamped for frozen-exterior (clamped reads only touch frozen cells).
    std::size_t neighbor(std::size_t p, int axis, int shift) const;

    int stencil_halfwidth() const { return fd_order / 2; }

    /// False on the frozen outer layers of a frozen-exterior grid.
    bool evolves(std::size_t p) const;

    /// True if the point is at least `margin` cells away from any
    /// non-periodic boundary (used for domain-of-dependence reporting).
    bool in_interior(std::size_t p, int margin) const;

    bool operator==(const GridSpec&) const = default;
};

/// Run fn(begin, end) over [0, count) in chunks, possibly on worker threads.
/// Chunk boundaries are independent of the thread count so outputs are
/// deterministic; reductions must stay inside one chunk or be done serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

void set_thread_count(int threads);
int thread_count();

}  // namespace gravfluid
