#include "vkshell/operators.hpp"

#include <algorithm>
#include <cmath>

namespace vkshell {

namespace {

template <int R, int C>
void check_input(const TensorField<R, C>& f, const char* where) {
    require_finite(f, where);
}

} // namespace

Eigen::VectorXd d1(const Grid2D& g, const Eigen::VectorXd& u) { return g.ops().d1 * u; }
Eigen::VectorXd d2(const Grid2D& g, const Eigen::VectorXd& u) { return g.ops().d2 * u; }
Eigen::VectorXd d11(const Grid2D& g, const Eigen::VectorXd& u) { return g.ops().d11 * u; }
Eigen::VectorXd d22(const Grid2D& g, const Eigen::VectorXd& u) { return g.ops().d22 * u; }
Eigen::VectorXd d12(const Grid2D& g, const Eigen::VectorXd& u) { return g.ops().d12 * u; }

VectorField2 gradient(const ScalarField& f) {
    check_input(f, "gradient");
    VectorField2 out(f.grid());
    out(0) = d1(f.grid(), f.values());
    out(1) = d2(f.grid(), f.values());
    return out;
}

MatrixField2 hessian(const ScalarField& f) {
    check_input(f, "hessian");
    const auto& g = f.grid();
    MatrixField2 out(g);
    out(0, 0) = d11(g, f.values());
    out(1, 1) = d22(g, f.values());
    out(0, 1) = d12(g, f.values());
    out(1, 0) = out(0, 1);
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    check_input(f, "laplacian");
    ScalarField out(f.grid());
    out.values() = f.grid().ops().lap * f.values();
    return out;
}

ScalarField bilaplacian(const ScalarField& f) {
    check_input(f, "bilaplacian");
    ScalarField out(f.grid());
    const auto& lap = f.grid().ops().lap;
    // Two applications rather than the assembled product, so this equals laplacian∘laplacian bitwise.
    out.values() = lap * Eigen::VectorXd(lap * f.values());
    return out;
}

MatrixField2 jacobian(const VectorField2& w) {
    check_input(w, "jacobian");
    const auto& g = w.grid();
    MatrixField2 out(g);
    for (int i = 0; i < 2; ++i) {
        out(i, 0) = d1(g, w(i));
        out(i, 1) = d2(g, w(i));
    }
    return out;
}

DiffResult apply_diff(const ScalarField& f, DiffKind kind) {
    switch (kind) {
    case DiffKind::Grad: return gradient(f);
    case DiffKind::Hessian: return hessian(f);
    case DiffKind::Laplacian: return laplacian(f);
    case DiffKind::Bilaplacian: return bilaplacian(f);
    }
    throw InputError("apply_diff: unknown kind");
}

ScalarField curl_t_curl(const MatrixField2& b) {
    check_input(b, "curl_t_curl");
    const auto& g = b.grid();
    ScalarField out(g);
    out.values() = d22(g, b(0, 0)) + d11(g, b(1, 1)) - d12(g, b(0, 1) + b(1, 0));
    return out;
}

ScalarField div_t_div(const MatrixField2& b) {
    check_input(b, "div_t_div");
    const auto& g = b.grid();
    ScalarField out(g);
    out.values() = d11(g, b(0, 0)) + d22(g, b(1, 1)) + d12(g, b(0, 1) + b(1, 0));
    return out;
}

VectorField2 row_curl(const MatrixField2& b) {
    check_input(b, "row_curl");
    const auto& g = b.grid();
    VectorField2 out(g);
    for (int i = 0; i < 2; ++i) out(i) = d1(g, b(i, 1)) - d2(g, b(i, 0));
    return out;
}

MatrixField2 cof2(const MatrixField2& b) {
    MatrixField2 out(b.grid());
    out(0, 0) = b(1, 1);
    out(0, 1) = -b(1, 0);
    out(1, 0) = -b(0, 1);
    out(1, 1) = b(0, 0);
    return out;
}

ScalarField det2(const MatrixField2& b) {
    ScalarField out(b.grid());
    out.values() = b(0, 0).cwiseProduct(b(1, 1)) - b(0, 1).cwiseProduct(b(1, 0));
    return out;
}

ScalarField contract(const MatrixField2& a, const MatrixField2& b) {
    require_same_grid(a.grid(), b.grid(), "contract");
    ScalarField out(a.grid());
    auto& v = out.values();
    for (int k = 0; k < 4; ++k) v += a.plane(k).cwiseProduct(b.plane(k));
    return out;
}

ScalarField airy_bracket(const ScalarField& v, const ScalarField& phi) {
    require_same_grid(v.grid(), phi.grid(), "airy_bracket");
    const auto hv = hessian(v);
    const auto hp = hessian(phi);
    ScalarField out(v.grid());
    // Written so that swapping (v, phi) swaps the factors of each product; the result is
    // then bitwise symmetric.
    out.values() = hv(0, 0).cwiseProduct(hp(1, 1)) + hv(1, 1).cwiseProduct(hp(0, 0)) -
                   2.0 * hv(0, 1).cwiseProduct(hp(0, 1));
    return out;
}

MatrixField2 sym(const MatrixField2& b) {
    MatrixField2 out(b.grid());
    out(0, 0) = b(0, 0);
    out(1, 1) = b(1, 1);
    out(0, 1) = 0.5 * (b(0, 1) + b(1, 0));
    out(1, 0) = out(0, 1);
    return out;
}

MatrixField2 outer(const VectorField2& a, const VectorField2& b) {
    require_same_grid(a.grid(), b.grid(), "outer");
    MatrixField2 out(a.grid());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = a(i).cwiseProduct(b(j));
    return out;
}

MatrixField2 minor2(const MatrixField3& m) {
    MatrixField2 out(m.grid());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = m(i, j);
    return out;
}

MatrixField3 embed3(const MatrixField2& m) {
    MatrixField3 out(m.grid());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = m(i, j);
    return out;
}

double integrate(const ScalarField& f) { return f.grid().weights().dot(f.values()); }

double mean(const ScalarField& f) { return integrate(f) / f.grid().weights().sum(); }

double l2_norm(const ScalarField& f) {
    return std::sqrt(f.grid().weights().dot(f.values().cwiseAbs2()));
}

double l2_norm(const VectorField2& f) {
    return std::sqrt(f.grid().weights().dot(f(0).cwiseAbs2() + f(1).cwiseAbs2()));
}

double max_norm(const ScalarField& f) { return f.size() ? f.values().cwiseAbs().maxCoeff() : 0.0; }

double interior_max_norm(const ScalarField& f, int band) {
    double worst = 0.0;
    const auto& g = f.grid();
    for (int n = 0; n < g.size(); ++n)
        if (g.boundary_distance(n) >= band) worst = std::max(worst, std::abs(f.values()[n]));
    return worst;
}

} // namespace vkshell
