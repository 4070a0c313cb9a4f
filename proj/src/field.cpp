#include "gravfluid/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "json.hpp"

namespace gravfluid {

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

double Field::deriv(std::size_t p, int c, int axis) const {
    if (!grid_.active(axis)) return 0.0;
    const double h = grid_.spacing(axis);
    if (grid_.fd_order == 2) {
        const double fp = at(grid_.neighbor(p, axis, 1), c);
        const double fm = at(grid_.neighbor(p, axis, -1), c);
        return (fp - fm) / (2.0 * h);
    }
    const double f1 = at(grid_.neighbor(p, axis, 1), c);
    const double fm1 = at(grid_.neighbor(p, axis, -1), c);
    const double f2 = at(grid_.neighbor(p, axis, 2), c);
    const double fm2 = at(grid_.neighbor(p, axis, -2), c);
    return (fm2 - 8.0 * fm1 + 8.0 * f1 - f2) / (12.0 * h);
}

void Field::deriv_all(std::size_t p, int axis, double* out) const {
    if (!grid_.active(axis)) {
        std::fill(out, out + ncomp_, 0.0);
        return;
    }
    const double h = grid_.spacing(axis);
    if (grid_.fd_order == 2) {
        const double* fp = point(grid_.neighbor(p, axis, 1));
        const double* fm = point(grid_.neighbor(p, axis, -1));
        const double inv = 1.0 / (2.0 * h);
        for (int c = 0; c < ncomp_; ++c) out[c] = (fp[c] - fm[c]) * inv;
        return;
    }
    const double* f1 = point(grid_.neighbor(p, axis, 1));
    const double* fm1 = point(grid_.neighbor(p, axis, -1));
    const double* f2 = point(grid_.neighbor(p, axis, 2));
    const double* fm2 = point(grid_.neighbor(p, axis, -2));
    const double inv = 1.0 / (12.0 * h);
    for (int c = 0; c < ncomp_; ++c)
        out[c] = (fm2[c] - 8.0 * fm1[c] + 8.0 * f1[c] - f2[c]) * inv;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Field::max_abs_interior(int margin) const {
    double m = 0.0;
    for (std::size_t p = 0; p < npoints(); ++p) {
        if (!grid_.in_interior(p, margin)) continue;
        for (int c = 0; c < ncomp_; ++c) m = std::max(m, std::abs(at(p, c)));
    }
    return m;
}

void write_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(f.data().data()),
              std::streamsize(f.data().size() * sizeof(double)));
    nlohmann::json meta;
    meta["n"] = f.grid().n;
    meta["extent"] = f.grid().extent;
    meta["boundary"] = f.grid().boundary == BoundaryMode::Periodic ? "periodic" : "frozen-exterior";
    meta["fd_order"] = f.grid().fd_order;
    meta["ncomp"] = f.ncomp();
    std::ofstream ms(path + ".meta.json");
    ms << meta.dump(2) << "\n";
}

Field read_binary(const std::string& path) {
    std::ifstream ms(path + ".meta.json");
    if (!ms) throw Error("missing metadata sidecar for " + path);
    nlohmann::json meta = nlohmann::json::parse(ms);
    GridSpec grid;
    grid.n = meta.at("n").get<std::array<int, 3>>();
    grid.extent = meta.at("extent").get<std::array<double, 3>>();
    grid.boundary = meta.at("boundary").get<std::string>() == "periodic"
                        ? BoundaryMode::Periodic
                        : BoundaryMode::FrozenExterior;
    grid.fd_order = meta.value("fd_order", 4);
    Field f(grid, meta.at("ncomp").get<int>());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    in.read(reinterpret_cast<char*>(f.data().data()),
            std::streamsize(f.data().size() * sizeof(double)));
    if (std::size_t(in.gcount()) != f.data().size() * sizeof(double))
        throw Error("truncated field payload in " + path);
    return f;
}

void write_csv(const Field& f, const std::string& path,
               const std::vector<std::string>& column_names) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.precision(17);
    out << "i,j,k,x,y,z";
    for (int c = 0; c < f.ncomp(); ++c) {
        if (int(column_names.size()) == f.ncomp())
            out << "," << column_names[c];
        else
            out << ",c" << c;
    }
    out << "\n";
    for (std::size_t p = 0; p < f.npoints(); ++p) {
        auto [i, j, k] = f.grid().unravel(p);
        auto x = f.grid().point(p);
        out << i << "," << j << "," << k << "," << x[0] << "," << x[1] << "," << x[2];
        for (int c = 0; c < f.ncomp(); ++c) out << "," << f.at(p, c);
        out << "\n";
    }
}

}  // namespace gravfluid
