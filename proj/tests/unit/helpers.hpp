#pragma once

#include "vkshell/closed_form.hpp"
#include "vkshell/field.hpp"
#include "vkshell/grid.hpp"

#include <cmath>
#include <numbers>

namespace vkshell::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Grid2D torus(int n) { return Grid2D(n, n, {0.0, kTwoPi, 0.0, kTwoPi}, BoundaryMode::Periodic); }
inline Grid2D unit_square(int n) { return Grid2D(n, n, {0.0, 1.0, 0.0, 1.0}, BoundaryMode::DirichletGhost); }

/// coef·t1(k1 x1 + p1)·t2(k2 x2 + p2)
inline ClosedForm wv(double coef, Wave t1, double k1, double p1, Wave t2 = Wave::One, double k2 = 0.0, double p2 = 0.0) {
    return ClosedForm::wave(coef, t1, k1, p1, t2, k2, p2);
}
inline ClosedForm mono(double coef, int p, int q) { return ClosedForm::monomial(coef, p, q); }

/// max over nodes with boundary distance ≥ band of |f − exact|.
template <class F>
double max_error(const ScalarField& f, F&& exact, int band = 0) {
    const Grid2D& g = f.grid();
    double e = 0.0;
    for (int n = 0; n < g.size(); ++n)
        if (g.boundary_distance(n) >= band) e = std::max(e, std::abs(f.values()[n] - exact(g.x1_of(n), g.x2_of(n))));
    return e;
}

} // namespace vkshell::test
