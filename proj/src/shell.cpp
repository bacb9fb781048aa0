#include "vkshell/shell.hpp"

#include "vkshell/errors.hpp"
#include "vkshell/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace vkshell {

namespace {

/// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

/// Partial derivatives d[a][b] of a closed form at one point, a + b ≤ 3.
struct Jet {
    double d[4][4] = {};
    Jet() = default;
    Jet(const ClosedForm& f, double x1, double x2, int order = 3) {
        for (int a = 0; a <= order; ++a)
            for (int b = 0; a + b <= order; ++b) d[a][b] = f.is_zero() ? 0.0 : f.derivative(x1, x2, a, b);
    }
    /// ∂_i, ∂_i∂_k, ∂_i∂_k∂_l with indices in {0, 1}; -1 means "no derivative".
    double p(int i, int k = -1, int l = -1) const {
        int a = 0, b = 0;
        for (int idx : {i, k, l}) {
            if (idx == 0) ++a;
            if (idx == 1) ++b;
        }
        return d[a][b];
    }
};

using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Growth tensor (or its first derivative in direction k) at a point.
Mat3 eval_tensor(const GrowthSpec::Tensor& t, double x1, double x2, int k = -1) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = t[i][j].derivative(x1, x2, k == 0 ? 1 : 0, k == 1 ? 1 : 0);
    return m;
}

Mat2 sym_minor(const Mat3& m) {
    const Mat2 a = m.topLeftCorner<2, 2>();
    return 0.5 * (a + a.transpose());
}

/// Jets of every ingredient at one point.
struct PointJets {
    Jet v0, v, w1, w2, vt;
    PointJets(const RecoveryState& s, const ClosedForm& v0f, double x1, double x2)
        : v0(v0f, x1, x2), v(s.v, x1, x2), w1(s.w[0], x1, x2), w2(s.w[1], x1, x2), vt(s.vtilde, x1, x2) {}
};

/// Regime stretching strain (k = -1) or its derivative ∂_k.
Mat2 stretch_at(const PointJets& j, Regime r, const GrowthSpec& g, double x1, double x2, int k) {
    const Jet* w[2] = {&j.w1, &j.w2};
    Mat2 s;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            double val = 0.5 * (w[a]->p(b, k) + w[b]->p(a, k));
            if (k < 0) {
                val += 0.5 * j.v.p(a) * j.v.p(b);
            } else {
                val += 0.5 * (j.v.p(a, k) * j.v.p(b) + j.v.p(a) * j.v.p(b, k));
            }
            if (r == Regime::Critical) {
                val -= k < 0 ? 0.5 * j.v0.p(a) * j.v0.p(b)
                             : 0.5 * (j.v0.p(a, k) * j.v0.p(b) + j.v0.p(a) * j.v0.p(b, k));
            }
            if (r == Regime::Shallow) {
                val += k < 0 ? 0.5 * (j.vt.p(a) * j.v0.p(b) + j.vt.p(b) * j.v0.p(a))
                             : 0.5 * (j.vt.p(a, k) * j.v0.p(b) + j.vt.p(a) * j.v0.p(b, k) + j.vt.p(b, k) * j.v0.p(a) +
                                      j.vt.p(b) * j.v0.p(a, k));
            }
            s(a, b) = val;
        }
    }
    return s - sym_minor(eval_tensor(g.eps, x1, x2, k));
}

/// Regime bending strain M = ∇²v + sym κ (− ∇²v0 at α = 1), or ∂_k M.
Mat2 bend_at(const PointJets& j, Regime r, const GrowthSpec& g, double x1, double x2, int k) {
    Mat2 m;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            m(a, b) = j.v.p(a, b, k);
            if (r == Regime::Critical) m(a, b) -= j.v0.p(a, b, k);
        }
    }
    return m + sym_minor(eval_tensor(g.kappa, x1, x2, k));
}

Vec3 q2c(const Mat2& a, const Material& m) { return q2_minimizer(a, m); }

/// Strain of the isometry completion, e = −sym(∇v⊗∇v0), or ∂_k e.
Mat2 iso_strain(const Jet& v, const Jet& v0, int k) {
    Mat2 e;
    for (int i = 0; i < 2; ++i) {
        for (int jj = 0; jj < 2; ++jj) {
            if (k < 0) {
                e(i, jj) = -0.5 * (v.p(i) * v0.p(jj) + v.p(jj) * v0.p(i));
            } else {
                e(i, jj) = -0.5 * (v.p(i, k) * v0.p(jj) + v.p(i) * v0.p(jj, k) + v.p(jj, k) * v0.p(i) +
                                   v.p(jj) * v0.p(i, k));
            }
        }
    }
    return e;
}

Eigen::Vector2d omega_gradient(const ClosedForm& vf, const ClosedForm& v0f, double x1, double x2) {
    const Jet v(vf, x1, x2, 2), v0(v0f, x1, x2, 2);
    const Mat2 e1 = iso_strain(v, v0, 0), e2 = iso_strain(v, v0, 1);
    return {e1(0, 1) - e2(0, 0), e1(1, 1) - e2(0, 1)};
}

const Mat2 kJ = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();

double dist_so3(const Mat3& f) {
    Eigen::JacobiSVD<Mat3> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return (f - svd.matrixU() * d * svd.matrixV().transpose()).norm();
}

} // namespace

GaussRule gauss_legendre(int n) {
    if (n < 1) throw InputError("gauss_legendre: need at least one node");
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jm(k, k - 1) = jm(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    GaussRule r;
    for (int k = 0; k < n; ++k) {
        r.nodes.push_back(es.eigenvalues()[k]);
        const double c = es.eigenvectors()(0, k);
        r.weights.push_back(2.0 * c * c);
    }
    // Symmetrize so that odd rules are exactly symmetric about 0.
    for (int k = 0; k < n / 2; ++k) {
        const double x = 0.5 * (r.nodes[n - 1 - k] - r.nodes[k]);
        const double w = 0.5 * (r.weights[k] + r.weights[n - 1 - k]);
        r.nodes[k] = -x;
        r.nodes[n - 1 - k] = x;
        r.weights[k] = r.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

double ShellConfig::gamma() const { return std::pow(h, alpha); }

void ShellConfig::validate(const Grid2D& grid) const {
    if (n_t < 3 || n_t % 2 == 0) throw InputError("shell: n_t must be an odd integer >= 3");
    if (!(h > 0.0)) throw InputError("shell: thickness h must be positive");
    const double ext = std::min(grid.domain().width(), grid.domain().height());
    if (h > 0.2 * ext) throw InputError("shell: thickness h exceeds 0.2 x the smallest domain extent");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("shell: alpha must be finite and nonnegative");
    if (!v0.all_finite()) throw InputError("shell: v0 has non-finite coefficients");
    const double g = gamma();
    for (int n = 0; n < grid.size(); ++n) {
        const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
        const double s = g * std::hypot(v0.derivative(x1, x2, 1, 0), v0.derivative(x1, x2, 0, 1));
        if (!(s < 1.0)) throw InputError("shell: gamma*|grad v0| >= 1, the shell is not shallow");
    }
}

Regime regime_for(const ShellConfig& cfg) {
    if (cfg.v0.is_zero() || cfg.alpha > 1.0) return Regime::Flat;
    if (cfg.alpha == 1.0) return Regime::Critical;
    if (cfg.alpha > 0.0) return Regime::Shallow;
    throw InputError("shell: alpha must be positive for a curved reference shape");
}

Functional limit_functional(Regime r) {
    switch (r) {
    case Regime::Flat: return Functional::I40;
    case Regime::Critical: return Functional::I41;
    case Regime::Shallow: return Functional::I4INF;
    }
    return Functional::I40;
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::Flat: return "flat";
    case Regime::Critical: return "critical";
    case Regime::Shallow: return "shallow";
    }
    return "?";
}

Eigen::Vector3d immersion_point(const ShellConfig& cfg, double x1, double x2, double x3) {
    const double g = cfg.gamma();
    const double p1 = cfg.v0.derivative(x1, x2, 1, 0), p2 = cfg.v0.derivative(x1, x2, 0, 1);
    const Vec3 n = Vec3(-g * p1, -g * p2, 1.0).normalized();
    return Vec3(x1, x2, g * cfg.v0(x1, x2)) + x3 * n;
}

Eigen::Matrix3d immersion_gradient(const ShellConfig& cfg, double x1, double x2, double x3) {
    const double g = cfg.gamma();
    const Jet v0(cfg.v0, x1, x2, 2);
    const Vec3 t1(1.0, 0.0, g * v0.p(0)), t2(0.0, 1.0, g * v0.p(1));
    const Vec3 m = t1.cross(t2);
    const double mn = m.norm();
    const Vec3 n = m / mn;
    Mat3 out;
    for (int i = 0; i < 2; ++i) {
        const Vec3 dt1(0.0, 0.0, g * v0.p(0, i)), dt2(0.0, 0.0, g * v0.p(1, i));
        const Vec3 dm = dt1.cross(t2) + t1.cross(dt2);
        const Vec3 dn = (dm - n * n.dot(dm)) / mn;
        out.col(i) = (i == 0 ? t1 : t2) + x3 * dn;
    }
    out.col(2) = n;
    return out;
}

Immersion immersion(const ShellConfig& cfg, const Grid2D& grid) {
    Immersion im{VectorField3(grid), VectorField3(grid)};
    for (int n = 0; n < grid.size(); ++n) {
        const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
        const Mat3 gr = immersion_gradient(cfg, x1, x2, 0.0);
        im.phi.set(n, immersion_point(cfg, x1, x2, 0.0));
        im.normal.set(n, gr.col(2));
    }
    return im;
}

Eigen::Matrix3d growth_qh(const GrowthFields& g, const ShellConfig& cfg, int node, double x3) {
    if (std::abs(x3) > 0.5 * cfg.h * (1.0 + 1e-12)) throw InputError("growth_qh: |x3| exceeds h/2");
    const Mat3 q = Mat3::Identity() + cfg.h * cfg.h * g.eps_g.at(node) + cfg.h * x3 * g.kappa_g.at(node);
    if (!(q.determinant() > 0.0)) throw InputError("growth_qh: growth tensor is not invertible (det q <= 0)");
    return q;
}

double density_W(const Eigen::Matrix3d& f, const Material& m) {
    const Mat3 e = f.transpose() * f - Mat3::Identity();
    const double tr = e.trace();
    return 0.25 * m.mu() * e.squaredNorm() + 0.125 * m.lambda() * tr * tr;
}

Eigen::Matrix3d metric_pullback(const GrowthSpec& g, const ClosedForm& v0, double h, double x1, double x2,
                                double x3) {
    ShellConfig cfg{v0, 1.0, h, 3};
    const Mat3 dphi = immersion_gradient(cfg, x1, x2, x3);
    const Mat3 q = Mat3::Identity() + h * h * eval_tensor(g.eps, x1, x2) + h * x3 * eval_tensor(g.kappa, x1, x2);
    return dphi.transpose() * (q.transpose() * q) * dphi;
}

Eigen::Matrix3d metric_expansion(const GrowthSpec& g, const ClosedForm& v0, double h, double x1, double x2,
                                 double x3) {
    const Jet j(v0, x1, x2, 2);
    const Mat3 e = eval_tensor(g.eps, x1, x2), k = eval_tensor(g.kappa, x1, x2);
    Mat3 eff_e = 0.5 * (e + e.transpose()), eff_k = 0.5 * (k + k.transpose());
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            eff_e(a, b) += 0.5 * j.p(a) * j.p(b);
            eff_k(a, b) -= j.p(a, b);
        }
    }
    return Mat3::Identity() + 2.0 * h * h * eff_e + 2.0 * h * x3 * eff_k;
}

double metric_residual(const GrowthSpec& g, const ClosedForm& v0, double h, const Grid2D& grid) {
    double worst = 0.0;
    for (int n = 0; n < grid.size(); ++n) {
        const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
        for (double t : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
            const double x3 = t * h;
            worst = std::max(worst, (metric_pullback(g, v0, h, x1, x2, x3) - metric_expansion(g, v0, h, x1, x2, x3)).norm());
        }
    }
    return worst;
}

Deformation3D identity_deformation(const ShellConfig& cfg, const Grid2D& grid) {
    const GaussRule gr = gauss_legendre(cfg.n_t);
    Deformation3D d(grid);
    d.n_t = cfg.n_t;
    d.h = cfg.h;
    for (int k = 0; k < cfg.n_t; ++k) {
        d.x3.push_back(0.5 * cfg.h * gr.nodes[k]);
        d.gauss_w.push_back(0.5 * cfg.h * gr.weights[k]);
    }
    for (int n = 0; n < grid.size(); ++n) {
        for (int k = 0; k < cfg.n_t; ++k) {
            const double x1 = grid.x1_of(n), x2 = grid.x2_of(n), x3 = d.x3[k];
            const Mat3 gp = immersion_gradient(cfg, x1, x2, x3);
            d.u.push_back(immersion_point(cfg, x1, x2, x3));
            d.grad_flat.push_back(gp);
            d.grad.push_back(Mat3::Identity());
            d.jac.push_back(gp.determinant());
        }
    }
    return d;
}

Deformation3D rigid_motion(const Deformation3D& d, const Eigen::Matrix3d& r, const Eigen::Vector3d& c) {
    Deformation3D out = d;
    for (int p = 0; p < d.points(); ++p) {
        out.u[p] = r * d.u[p] + c;
        out.grad[p] = r * d.grad[p];
        out.grad_flat[p] = r * d.grad_flat[p];
    }
    return out;
}

Energy3D energy_3d(const Deformation3D& u, const GrowthFields& g, const ShellConfig& cfg, const Material& m,
                   EnergyRoute route) {
    require_same_grid(u.grid, g.grid(), "energy_3d");
    if (u.points() != u.grid.size() * u.n_t) throw ShapeError("energy_3d: deformation sample count mismatch");
    if (route == EnergyRoute::PulledBack && static_cast<int>(u.a_pull.size()) != u.points())
        throw InputError("energy_3d: pulled-back route needs the alpha = 1 recovery growth");
    const auto& wt = u.grid.weights();
    CompensatedSum acc;
    Energy3D out;
    for (int n = 0; n < u.grid.size(); ++n) {
        for (int k = 0; k < u.n_t; ++k) {
            const int p = n * u.n_t + k;
            Mat3 f;
            if (route == EnergyRoute::Direct) {
                f = u.grad[p] * growth_qh(g, cfg, n, u.x3[k]).inverse();
            } else {
                f = u.grad_flat[p] * u.a_pull[p].inverse();
            }
            if (!(f.determinant() > 0.0)) ++out.inverted_points;
            const double dso = dist_so3(f);
            out.max_dist_so3 = std::max(out.max_dist_so3, dso);
            if (dso > 0.3) ++out.far_points;
            acc.add(wt[n] * u.gauss_w[k] * u.jac[p] * density_W(f, m));
        }
    }
    out.value = acc.value() / u.h;
    return out;
}

LimitStrains limit_strains(const RecoveryState& s, const GrowthSpec& g, const ShellConfig& cfg, const Grid2D& grid) {
    const Regime r = regime_for(cfg);
    LimitStrains out(grid);
    for (int n = 0; n < grid.size(); ++n) {
        const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
        const PointJets j(s, cfg.v0, x1, x2);
        out.stretch.set(n, stretch_at(j, r, g, x1, x2, -1));
        out.bend.set(n, bend_at(j, r, g, x1, x2, -1));
    }
    return out;
}

Deformation3D build_recovery(const RecoveryState& s, const GrowthSpec& g, const ShellConfig& cfg,
                             const Material& m, const Grid2D& grid) {
    g.validate();
    cfg.validate(grid);
    const Regime r = regime_for(cfg);
    if (r != Regime::Shallow && !s.vtilde.is_zero())
        throw InputError("build_recovery: vtilde is only meaningful in the shallow regime (0 < alpha < 1)");
    const double h = cfg.h, gam = cfg.gamma();
    const GaussRule gr = gauss_legendre(cfg.n_t);
    const GaussRule line = gauss_legendre(30);
    const int nn = grid.size();

    // Isometry completion w̃ (shallow only): gradient e + ωJ, ω line-integrated from the corner.
    std::vector<Mat2> dwt(nn, Mat2::Zero());
    std::vector<Eigen::Vector2d> domega(nn, Eigen::Vector2d::Zero());
    Eigen::VectorXd wt1 = Eigen::VectorXd::Zero(nn), wt2 = Eigen::VectorXd::Zero(nn);
    if (r == Regime::Shallow) {
        const double a1 = grid.domain().a1, a2 = grid.domain().a2;
        for (int n = 0; n < nn; ++n) {
            const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
            double om = 0.0;
            for (int q = 0; q < static_cast<int>(line.nodes.size()); ++q) {
                const double t = 0.5 * (line.nodes[q] + 1.0), wq = 0.5 * line.weights[q];
                om += wq * (x1 - a1) * omega_gradient(s.v, cfg.v0, a1 + t * (x1 - a1), a2)[0];
                om += wq * (x2 - a2) * omega_gradient(s.v, cfg.v0, x1, a2 + t * (x2 - a2))[1];
            }
            const Jet v(s.v, x1, x2, 2), v0(cfg.v0, x1, x2, 2);
            dwt[n] = iso_strain(v, v0, -1) + om * kJ;
            domega[n] = omega_gradient(s.v, cfg.v0, x1, x2);
        }
        // Value of w̃ only enters u, not ∇u: trapezoid path integration is enough.
        for (int i = 1; i < grid.nx(); ++i) {
            const int a = grid.index(i - 1, 0), b = grid.index(i, 0);
            wt1[b] = wt1[a] + 0.5 * grid.dx() * (dwt[a](0, 0) + dwt[b](0, 0));
            wt2[b] = wt2[a] + 0.5 * grid.dx() * (dwt[a](1, 0) + dwt[b](1, 0));
        }
        for (int i = 0; i < grid.nx(); ++i) {
            for (int jj = 1; jj < grid.ny(); ++jj) {
                const int a = grid.index(i, jj - 1), b = grid.index(i, jj);
                wt1[b] = wt1[a] + 0.5 * grid.dy() * (dwt[a](0, 1) + dwt[b](0, 1));
                wt2[b] = wt2[a] + 0.5 * grid.dy() * (dwt[a](1, 1) + dwt[b](1, 1));
            }
        }
    }

    Deformation3D d(grid);
    d.n_t = cfg.n_t;
    d.h = h;
    for (int k = 0; k < cfg.n_t; ++k) {
        d.x3.push_back(0.5 * h * gr.nodes[k]);
        d.gauss_w.push_back(0.5 * h * gr.weights[k]);
    }
    const int np = nn * cfg.n_t;
    d.u.reserve(np);
    d.grad_flat.reserve(np);
    d.grad.reserve(np);
    d.jac.reserve(np);
    if (r == Regime::Critical) d.a_pull.reserve(np);

    for (int n = 0; n < nn; ++n) {
        const double x1 = grid.x1_of(n), x2 = grid.x2_of(n);
        const PointJets j(s, cfg.v0, x1, x2);

        // Mid-surface y0 and its first/second derivatives.
        Vec3 y0(x1 + h * h * j.w1.p(-1), x2 + h * h * j.w2.p(-1), h * j.v.p(-1));
        Vec3 dy[2], ddy[2][2];
        for (int i = 0; i < 2; ++i) {
            dy[i] = Vec3(i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, 0.0) + h * h * Vec3(j.w1.p(i), j.w2.p(i), 0.0) +
                    Vec3(0.0, 0.0, h * j.v.p(i));
            for (int k = 0; k < 2; ++k)
                ddy[i][k] = h * h * Vec3(j.w1.p(i, k), j.w2.p(i, k), 0.0) + Vec3(0.0, 0.0, h * j.v.p(i, k));
        }
        if (r != Regime::Critical) {
            y0[2] += gam * j.v0.p(-1);
            for (int i = 0; i < 2; ++i) {
                dy[i][2] += gam * j.v0.p(i);
                for (int k = 0; k < 2; ++k) ddy[i][k][2] += gam * j.v0.p(i, k);
            }
        }
        if (r == Regime::Shallow) {
            const Jet v(s.v, x1, x2, 2), v0(cfg.v0, x1, x2, 2);
            const double hg = h * gam, hh = h * h / gam;
            y0 += Vec3(hg * wt1[n], hg * wt2[n], hh * j.vt.p(-1));
            for (int i = 0; i < 2; ++i) {
                dy[i] += Vec3(hg * dwt[n](0, i), hg * dwt[n](1, i), hh * j.vt.p(i));
                for (int k = 0; k < 2; ++k) {
                    const Mat2 de = iso_strain(v, v0, k);
                    ddy[i][k] += Vec3(hg * (de(0, i) + domega[n][k] * kJ(0, i)),
                                      hg * (de(1, i) + domega[n][k] * kJ(1, i)), hh * j.vt.p(i, k));
                }
            }
        }

        // Unit normal of the deformed mid-surface and its derivatives.
        const Vec3 mv = dy[0].cross(dy[1]);
        const double mn = mv.norm();
        const Vec3 nrm = mv / mn;
        Vec3 dn[2];
        for (int i = 0; i < 2; ++i) {
            const Vec3 dm = ddy[0][i].cross(dy[1]) + dy[0].cross(ddy[1][i]);
            dn[i] = (dm - nrm * nrm.dot(dm)) / mn;
        }

        // Warping vectors at their limits: d0 = l(ε) + 2c(S), d1 = l(κ) + 2c(−M).
        const Mat3 eps = eval_tensor(g.eps, x1, x2), kap = eval_tensor(g.kappa, x1, x2);
        const Vec3 d0 = warping_l(eps) + 2.0 * q2c(stretch_at(j, r, g, x1, x2, -1), m);
        const Vec3 d1 = warping_l(kap) + 2.0 * q2c(-bend_at(j, r, g, x1, x2, -1), m);
        Vec3 dd0[2], dd1[2];
        for (int i = 0; i < 2; ++i) {
            dd0[i] = warping_l(eval_tensor(g.eps, x1, x2, i)) + 2.0 * q2c(stretch_at(j, r, g, x1, x2, i), m);
            dd1[i] = warping_l(eval_tensor(g.kappa, x1, x2, i)) + 2.0 * q2c(-bend_at(j, r, g, x1, x2, i), m);
        }

        Mat3 a_base = Mat3::Zero(), a_lin = Mat3::Zero();
        if (r == Regime::Critical) {
            a_base = 0.5 * (eps + eps.transpose());
            a_lin = 0.5 * (kap + kap.transpose());
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    a_base(a, b) += 0.5 * j.v0.p(a) * j.v0.p(b);
                    a_lin(a, b) -= j.v0.p(a, b);
                }
            }
        }

        for (int k = 0; k < cfg.n_t; ++k) {
            const double t = d.x3[k];
            Mat3 gy;
            for (int i = 0; i < 2; ++i) gy.col(i) = dy[i] + t * (dn[i] + h * h * dd0[i]) + 0.5 * t * t * h * dd1[i];
            gy.col(2) = nrm + h * h * d0 + t * h * d1;
            const Mat3 gp = immersion_gradient(cfg, x1, x2, t);
            d.u.push_back(y0 + t * (nrm + h * h * d0) + 0.5 * t * t * h * d1);
            d.grad_flat.push_back(gy);
            d.grad.push_back(gy * gp.inverse());
            d.jac.push_back(gp.determinant());
            if (r == Regime::Critical) d.a_pull.push_back(Mat3::Identity() + h * h * a_base + h * t * a_lin);
        }
    }
    return d;
}

ScalingTable scaling_study(double alpha, const std::vector<double>& h_list, const GrowthSpec& g,
                           const ClosedForm& v0, const RecoveryState& state, const Material& m, const Grid2D& grid,
                           int n_t, EnergyRoute route, int threads) {
    if (h_list.empty()) throw InputError("scaling_study: empty h list");
    for (std::size_t k = 1; k < h_list.size(); ++k)
        if (!(h_list[k] < h_list[k - 1])) throw InputError("scaling_study: h list must be strictly decreasing");

    ShellConfig base{v0, alpha, h_list.front(), n_t};
    ScalingTable table;
    table.regime = regime_for(base);
    table.alpha = alpha;
    if (route == EnergyRoute::PulledBack && table.regime != Regime::Critical)
        throw InputError("scaling_study: the pulled-back route applies to alpha = 1 only");

    const GrowthFields gf = eval_growth(g, grid);
    table.incompatibility_norm = incompatibility(gf).norm;

    const LimitStrains ls = limit_strains(state, g, base, grid);
    const double e2d = quadrature_energy(ls.stretch, ls.bend, m).functional();

    {
        PlateState ps(grid, variant_for(limit_functional(table.regime)));
        ps.v = sample(state.v, grid);
        ps.w(0) = sample(state.w[0], grid).values();
        ps.w(1) = sample(state.w[1], grid).values();
        if (ps.variant == PlateVariant::Shallow) ps.vtilde = sample(state.vtilde, grid);
        const auto f = limit_functional(table.regime);
        const ScalarField v0s = sample(v0, grid);
        const PlateFunctional fn = f == Functional::I40 ? PlateFunctional(f, gf, m) : PlateFunctional(f, gf, m, v0s);
        table.e2d_fd = fn.evaluate(ps).functional();
    }

    table.rows.resize(h_list.size());
    std::vector<Energy3D> energies(h_list.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (std::size_t k = next++; k < h_list.size(); k = next++) {
            try {
                ShellConfig cfg{v0, alpha, h_list[k], n_t};
                const Deformation3D def = build_recovery(state, g, cfg, m, grid);
                energies[k] = energy_3d(def, gf, cfg, m, route);
                const double h4 = std::pow(h_list[k], 4);
                table.rows[k] = {h_list[k], cfg.gamma(), energies[k].value, energies[k].value / h4, e2d,
                                 e2d > 0.0 ? energies[k].value / h4 / e2d : std::nan("")};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nthreads = std::clamp(threads, 1, static_cast<int>(h_list.size()));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& e : energies) {
        table.inverted_points += e.inverted_points;
        table.far_points += e.far_points;
    }
    return table;
}

} // namespace vkshell
