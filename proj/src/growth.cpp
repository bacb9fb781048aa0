#include "vkshell/growth.hpp"

#include "vkshell/operators.hpp"

#include <string>

namespace vkshell {

void GrowthSpec::validate() const {
    auto check = [](const Tensor& t, const char* name) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const auto& f = t[i][j];
                const std::string where = std::string(name) + "." + std::to_string(i + 1) + "." + std::to_string(j + 1);
                if (!f.all_finite()) throw SpecError(where + ": non-finite coefficient or negative power");
                if (f.max_poly_degree() > kMaxDegree)
                    throw SpecError(where + ": polynomial degree " + std::to_string(f.max_poly_degree()) +
                                    " exceeds " + std::to_string(kMaxDegree));
            }
        }
    };
    check(eps, "eps");
    check(kappa, "kappa");
}

bool GrowthSpec::is_zero() const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!eps[i][j].is_zero() || !kappa[i][j].is_zero()) return false;
    return true;
}

GrowthFields eval_growth(const GrowthSpec& spec, const Grid2D& grid) {
    spec.validate();
    GrowthFields out(grid);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.eps_g(i, j) = sample(spec.eps[i][j], grid).values();
            out.kappa_g(i, j) = sample(spec.kappa[i][j], grid).values();
        }
    }
    return out;
}

ScalarField lambda_g(const GrowthFields& g) { return curl_t_curl(sym(minor2(g.eps_g))); }

ScalarField omega_g(const GrowthFields& g, double nu) {
    if (!(nu >= 0.0 && nu < 0.5)) throw InputError("omega_g: Poisson ratio must lie in [0, 1/2)");
    const auto k = sym(minor2(g.kappa_g));
    return div_t_div(k + nu * cof2(k));
}

GrowthFields effective_growth(const GrowthFields& g, const ScalarField& v0) {
    require_same_grid(g.grid(), v0.grid(), "effective_growth");
    const auto dv = gradient(v0);
    GrowthFields out(g.grid());
    out.eps_g = symmetric_part(g.eps_g) + embed3(0.5 * outer(dv, dv));
    out.kappa_g = symmetric_part(g.kappa_g) - embed3(hessian(v0));
    return out;
}

Incompatibility incompatibility(const GrowthFields& g) {
    auto c = row_curl(sym(minor2(g.kappa_g)));
    const double n = l2_norm(c);
    return {std::move(c), n};
}

MatrixField2 strain_pullback(const MatrixField3& m, const ScalarField& v0, double gamma) {
    require_same_grid(m.grid(), v0.grid(), "strain_pullback");
    if (!(gamma >= 0.0)) throw InputError("strain_pullback: gamma must be nonnegative");
    const auto dv = gradient(v0);
    MatrixField2 out(m.grid());
    for (int n = 0; n < m.size(); ++n) {
        Eigen::Matrix<double, 3, 2> dphi;
        dphi << 1.0, 0.0, 0.0, 1.0, gamma * dv(0)[n], gamma * dv(1)[n];
        out.set(n, dphi.transpose() * m.at(n) * dphi);
    }
    return out;
}

MatrixField2 tangential_strain(const VectorField3& w, const ScalarField& v0, double gamma) {
    require_same_grid(w.grid(), v0.grid(), "tangential_strain");
    const auto& g = w.grid();
    const auto dv = gradient(v0);
    MatrixField2 out(g);
    Eigen::VectorXd dw[3][2];
    for (int k = 0; k < 3; ++k) {
        dw[k][0] = d1(g, w(k));
        dw[k][1] = d2(g, w(k));
    }
    for (int n = 0; n < g.size(); ++n) {
        Eigen::Matrix<double, 3, 2> dphi, dW;
        dphi << 1.0, 0.0, 0.0, 1.0, gamma * dv(0)[n], gamma * dv(1)[n];
        for (int k = 0; k < 3; ++k) dW.row(k) << dw[k][0][n], dw[k][1][n];
        const Eigen::Matrix2d a = dphi.transpose() * dW;
        out.set(n, 0.5 * (a + a.transpose()));
    }
    return out;
}

} // namespace vkshell
