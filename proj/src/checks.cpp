#include "vkshell/checks.hpp"

#include "vkshell/errors.hpp"
#include "vkshell/operators.hpp"
#include "vkshell/plate_energy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace vkshell {

namespace {

double wavenumber(const Box& d) { return 2.0 * std::numbers::pi / std::min(d.width(), d.height()); }

ScalarField exact(const Grid2D& g, auto&& fn) {
    ScalarField out(g);
    for (int n = 0; n < g.size(); ++n) out.values()[n] = fn(g.x1_of(n), g.x2_of(n));
    return out;
}

double relative(double residual, double reference) {
    return residual / std::max(reference, std::numeric_limits<double>::min());
}

/// max |∇²v0|² over the interior (exact).
double hessian_scale(const Grid2D& g, const ClosedForm& v0) {
    const ScalarField h2 = exact(g, [&](double x, double y) {
        const double a = v0.derivative(x, y, 2, 0), b = v0.derivative(x, y, 0, 2), c = v0.derivative(x, y, 1, 1);
        return a * a + b * b + 2.0 * c * c;
    });
    return interior_max_norm(h2, kInteriorBand);
}

} // namespace

ClosedForm test_function(const Box& d, int which) {
    const double k1 = 2.0 * std::numbers::pi / d.width(), k2 = 2.0 * std::numbers::pi / d.height();
    // Phases are shifted by the domain origin so the catalog does not depend on where the box sits.
    const double p1 = -k1 * d.a1, p2 = -k2 * d.a2;
    switch (which) {
    case 0:
        return ClosedForm::wave(1.0, Wave::Sin, k1, p1 + 0.4, Wave::Cos, k2, p2 - 0.3) +
               ClosedForm::wave(0.5, Wave::Cos, 2.0 * k1, 2.0 * p1 + 0.1, Wave::One, 0.0, 0.0);
    case 1:
        return ClosedForm::wave(1.0, Wave::Cos, k1, p1 - 0.2, Wave::Sin, 2.0 * k2, 2.0 * p2 + 0.5);
    case 2:
        return ClosedForm::wave(1.0, Wave::Sin, k1, p1, Wave::Sin, k2, p2 + 0.7);
    case 3:
        return ClosedForm::wave(1.0, Wave::Cos, 2.0 * k1, 2.0 * p1 + 0.3, Wave::Cos, k2, p2);
    default:
        throw InputError("test_function: index out of range");
    }
}

double resolution(const Grid2D& g) { return wavenumber(g.domain()) * std::max(g.dx(), g.dy()); }

Grid2D rescaled(const Grid2D& g, int num, int den) {
    return Grid2D(g.nx() * num / den, g.ny() * num / den, g.domain(), g.bc());
}

double cofactor_contraction_residual(const Grid2D& g, const ClosedForm& v0, const ClosedForm& v3) {
    const ScalarField a = sample(v0, g), b = sample(v3, g);
    const ScalarField lhs = curl_t_curl(sym(outer(gradient(b), gradient(a))));
    const ScalarField ref = exact(g, [&](double x, double y) {
        return v0.derivative(x, y, 0, 2) * v3.derivative(x, y, 2, 0) + v0.derivative(x, y, 2, 0) * v3.derivative(x, y, 0, 2) -
               2.0 * v0.derivative(x, y, 1, 1) * v3.derivative(x, y, 1, 1);
    });
    return relative(interior_max_norm(lhs + ref, kInteriorBand), interior_max_norm(ref, kInteriorBand));
}

double sym_grad_kernel_residual(const Grid2D& g, const ClosedForm& w1, const ClosedForm& w2) {
    VectorField2 w(g);
    w.plane(0) = sample(w1, g).values();
    w.plane(1) = sample(w2, g).values();
    const ScalarField r = curl_t_curl(sym(jacobian(w)));
    double ref = 0.0;
    for (const auto* f : {&w1, &w2})
        for (int d = 0; d <= 3; ++d) ref = std::max(ref, interior_max_norm(sample(*f, g, d, 3 - d), kInteriorBand));
    return relative(interior_max_norm(r, kInteriorBand), ref);
}

double cofactor_divergence_residual(const Grid2D& g, const ClosedForm& v0) {
    const ScalarField r = div_t_div(cof2(hessian(sample(v0, g))));
    const ScalarField ref = exact(g, [&](double x, double y) {
        return v0.derivative(x, y, 4, 0) + 2.0 * v0.derivative(x, y, 2, 2) + v0.derivative(x, y, 0, 4);
    });
    return relative(interior_max_norm(r, kInteriorBand), interior_max_norm(ref, kInteriorBand));
}

double bracket_asymmetry(const Grid2D& g, const ClosedForm& v, const ClosedForm& phi) {
    const ScalarField a = sample(v, g), b = sample(phi, g);
    return max_norm(airy_bracket(a, b) - airy_bracket(b, a));
}

double lambda_shift_residual(const Grid2D& g, const GrowthSpec& growth, const ClosedForm& v0) {
    const GrowthFields gf = eval_growth(growth, g);
    const ScalarField s = sample(v0, g);
    const ScalarField det = exact(g, [&](double x, double y) {
        const double h12 = v0.derivative(x, y, 1, 1);
        return v0.derivative(x, y, 2, 0) * v0.derivative(x, y, 0, 2) - h12 * h12;
    });
    const ScalarField r = lambda_g(effective_growth(gf, s)) - (lambda_g(gf) - det);
    return relative(interior_max_norm(r, kInteriorBand), hessian_scale(g, v0));
}

double omega_shift_residual(const Grid2D& g, const GrowthSpec& growth, const ClosedForm& v0, double nu) {
    const GrowthFields gf = eval_growth(growth, g);
    const ScalarField s = sample(v0, g);
    const ScalarField bilap = exact(g, [&](double x, double y) {
        return v0.derivative(x, y, 4, 0) + 2.0 * v0.derivative(x, y, 2, 2) + v0.derivative(x, y, 0, 4);
    });
    const ScalarField r = omega_g(effective_growth(gf, s), nu) - (omega_g(gf, nu) - bilap);
    double ref = std::sqrt(hessian_scale(g, v0));
    for (int d = 0; d <= 4; ++d) ref = std::max(ref, interior_max_norm(sample(v0, g, d, 4 - d), kInteriorBand));
    return relative(interior_max_norm(r, kInteriorBand), ref);
}

double decomposition_residual(const MatrixField2& b, const ScalarField& v0, const ScalarField& v) {
    const Grid2D& g = b.grid();
    const int band = (std::min(g.nx(), g.ny()) - 1) / 4;
    return interior_max_norm(curl_t_curl(b - sym(outer(gradient(v), gradient(v0)))), band);
}

double q2_bruteforce_error(const std::vector<Material>& materials, int inputs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (const Material& m : materials) {
        for (int t = 0; t < inputs; ++t) {
            Eigen::Matrix2d f;
            f << u(rng), u(rng), u(rng), u(rng);
            Eigen::Matrix3d f3 = Eigen::Matrix3d::Zero();
            f3.topLeftCorner<2, 2>() = f;
            const Eigen::Vector3d e3(0.0, 0.0, 1.0);
            auto energy = [&](const Eigen::Vector3d& c) {
                return q3(f3 + c * e3.transpose() + e3 * c.transpose(), m);
            };
            // Q3 is quadratic in c, so unit-step differences recover its gradient and Hessian exactly.
            const double f0 = energy(Eigen::Vector3d::Zero());
            Eigen::Vector3d grad;
            Eigen::Matrix3d hess;
            for (int i = 0; i < 3; ++i) {
                const Eigen::Vector3d ei = Eigen::Vector3d::Unit(i);
                grad(i) = 0.5 * (energy(ei) - energy(-ei));
                for (int j = 0; j < 3; ++j) {
                    const Eigen::Vector3d ej = Eigen::Vector3d::Unit(j);
                    hess(i, j) = i == j ? energy(ei) + energy(-ei) - 2.0 * f0
                                        : 0.25 * (energy(ei + ej) - energy(ei - ej) - energy(ej - ei) + energy(-ei - ej));
                }
            }
            const Eigen::Vector3d c = hess.ldlt().solve(-grad);
            const double brute = energy(c);
            const double closed = q2(f, m).value;
            worst = std::max(worst, std::abs(closed - brute) / std::max(std::abs(brute), 1e-300));
        }
    }
    return worst;
}

CollapseGap collapse_gap(const Grid2D& g, const GrowthSpec& growth, const Material& m, int states,
                         std::uint64_t seed) {
    const GrowthFields gf = eval_growth(growth, g);
    const ScalarField flat(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CollapseGap gap;
    for (int s = 0; s < states; ++s) {
        PlateState plate(g, PlateVariant::Plate);
        PlateState shallow(g, PlateVariant::Shallow);
        for (int n = 0; n < g.size(); ++n) {
            plate.v.values()[n] = u(rng);
            plate.w.plane(0)[n] = u(rng);
            plate.w.plane(1)[n] = u(rng);
            shallow.vtilde.values()[n] = u(rng);
        }
        shallow.v = plate.v;
        shallow.w = plate.w;
        const double e0 = energy_i40(plate, gf, m);
        const double e1 = energy_i41(plate, gf, m, flat);
        const double einf = energy_i4inf(shallow, gf, m, flat, 1.0).energy;
        const double scale = std::max(std::abs(e0), std::numeric_limits<double>::min());
        gap.i41 = std::max(gap.i41, std::abs(e1 - e0) / scale);
        gap.i4inf = std::max(gap.i4inf, std::abs(einf - e0) / scale);
    }
    return gap;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& r) {
    if (x.size() != r.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(r[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(r[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace vkshell
