#include "vkshell/field.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace vkshell {

ScalarField sample(const ClosedForm& f, const Grid2D& grid, int d1, int d2) {
    ScalarField out(grid);
    auto& v = out.values();
    for (int n = 0; n < grid.size(); ++n) v[n] = f.derivative(grid.x1_of(n), grid.x2_of(n), d1, d2);
    return out;
}

double asymmetry(const MatrixField2& f) {
    double worst = 0.0;
    for (int n = 0; n < f.size(); ++n) {
        const auto m = f.at(n);
        worst = std::max(worst, std::abs(m(0, 1) - m(1, 0)) / (1.0 + m.norm()));
    }
    return worst;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

template <int R, int C>
void write_csv(std::ostream& os, const TensorField<R, C>& f) {
    os << "x1,x2";
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) os << ",c" << i + 1 << j + 1;
    os << '\n';
    const auto& g = f.grid();
    for (int n = 0; n < g.size(); ++n) {
        os << fmt17(g.x1_of(n)) << ',' << fmt17(g.x2_of(n));
        for (int k = 0; k < R * C; ++k) os << ',' << fmt17(f.plane(k)[n]);
        os << '\n';
    }
}

template <int R, int C>
void write_csv(const std::string& path, const TensorField<R, C>& f) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open " + path + " for writing");
    write_csv(os, f);
    if (!os) throw InputError("failed writing " + path);
}

template <int R, int C>
TensorField<R, C> read_csv(std::istream& is, const Grid2D& grid) {
    TensorField<R, C> f(grid);
    std::string line;
    if (!std::getline(is, line)) throw InputError("csv: missing header");
    std::vector<double> vals;
    for (int n = 0; n < grid.size(); ++n) {
        if (!std::getline(is, line)) throw ShapeError("csv: fewer rows than grid nodes");
        std::stringstream ss(line);
        std::string cell;
        vals.clear();
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != 2 + R * C) throw ShapeError("csv: wrong column count");
        const double tol = 1e-12 * (1.0 + std::abs(vals[0]) + std::abs(vals[1]));
        if (std::abs(vals[0] - grid.x1_of(n)) > tol || std::abs(vals[1] - grid.x2_of(n)) > tol)
            throw ShapeError("csv: node coordinates do not match grid");
        for (int k = 0; k < R * C; ++k) f.plane(k)[n] = vals[2 + k];
    }
    return f;
}

#define VKSHELL_INSTANTIATE_IO(R, C)                                                  \
    template void write_csv<R, C>(std::ostream&, const TensorField<R, C>&);          \
    template void write_csv<R, C>(const std::string&, const TensorField<R, C>&);     \
    template TensorField<R, C> read_csv<R, C>(std::istream&, const Grid2D&);

VKSHELL_INSTANTIATE_IO(1, 1)
VKSHELL_INSTANTIATE_IO(2, 1)
VKSHELL_INSTANTIATE_IO(3, 1)
VKSHELL_INSTANTIATE_IO(2, 2)
VKSHELL_INSTANTIATE_IO(3, 3)

#undef VKSHELL_INSTANTIATE_IO

} // namespace vkshell
