#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravfluid/grid.hpp"

namespace gravfluid {

/// Index of the (a,b) component of a symmetric 4x4 tensor stored as 10 values,
/// ordered 00,01,02,03,11,12,13,22,23,33.
inline constexpr int sym4(int a, int b) {
    constexpr int tab[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
    return tab[a][b];
}

/// Symmetric 3x3 tensor stored as 6 values, ordered 11,12,13,22,23,33.
inline constexpr int sym3(int a, int b) {
    constexpr int tab[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return tab[a][b];
}

/// Layout of the 55-component coupled state U = (v, dtv, dxv, W).
namespace layout {
inline constexpr int v0 = 0;     // g_ab - eta_ab, 10 components
inline constexpr int dtv0 = 10;  // d_t g_ab, 10 components
inline constexpr int dxv0 = 20;  // d_a g_bc, axis-major, 30 components
inline constexpr int w0 = 50;    // fluid block, 5 components
inline constexpr int nU = 55;
inline constexpr int dxv(int axis, int s) { return dxv0 + 10 * axis + s; }
}  // namespace layout

/// Multi-component scalar field on a GridSpec. Storage is row-major over grid
/// points with components contiguous per point (the serialization layout).
class Field {
  public:
    Field() = default;
    Field(const GridSpec& grid, int ncomp, double fill = 0.0)
        : grid_(grid), ncomp_(ncomp), data_(grid.npoints() * ncomp, fill) {}

    const GridSpec& grid() const { return grid_; }
    int ncomp() const { return ncomp_; }
    std::size_t npoints() const { return grid_.npoints(); }

    double& at(std::size_t p, int c) { return data_[p * ncomp_ + c]; }
    double at(std::size_t p, int c) const { return data_[p * ncomp_ + c]; }
    double* point(std::size_t p) { return data_.data() + p * ncomp_; }
    const double* point(std::size_t p) const { return data_.data() + p * ncomp_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double value);

    /// Centered finite difference of component c along axis at point p,
    /// at the grid's fd_order. Zero along suppressed axes.
    double deriv(std::size_t p, int c, int axis) const;

    /// Derivative of every component at p into out[ncomp].
    void deriv_all(std::size_t p, int axis, double* out) const;

    double max_abs() const;
    double max_abs_interior(int margin) const;

    bool operator==(const Field&) const = default;

  private:
    GridSpec grid_;
    int ncomp_ = 0;
    std::vector<double> data_;
};

/// Raw row-major float64 dump (components fastest). Grid metadata goes to a
/// JSON sidecar written next to the payload.
void write_binary(const Field& f, const std::string& path);
Field read_binary(const std::string& path);

void write_csv(const Field& f, const std::string& path,
               const std::vector<std::string>& column_names = {});

}  // namespace gravfluid
