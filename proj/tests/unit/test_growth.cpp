#include "helpers.hpp"

#include "vkshell/checks.hpp"
#include "vkshell/errors.hpp"
#include "vkshell/growth.hpp"
#include "vkshell/operators.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vkshell;
using namespace vkshell::test;

TEST(GrowthSpec, DegreeBoundAndFiniteness) {
    GrowthSpec s;
    s.eps[0][0] = mono(1.0, 4, 2);
    EXPECT_NO_THROW(s.validate());
    s.eps[0][0] = mono(1.0, 4, 3);
    EXPECT_THROW(s.validate(), SpecError);
    s.eps[0][0] = mono(std::nan(""), 1, 0);
    EXPECT_THROW(s.validate(), SpecError);
    EXPECT_THROW(eval_growth(s, unit_square(8)), SpecError);
}

TEST(EvalGrowth, ZeroSpecGivesZeroFields) {
    const GrowthFields g = eval_growth(GrowthSpec{}, unit_square(9));
    for (int k = 0; k < 9; ++k) {
        EXPECT_EQ(g.eps_g.plane(k).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(g.kappa_g.plane(k).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(EvalGrowth, SingleTermIsExact) {
    GrowthSpec s;
    s.eps[0][0] = mono(0.5, 0, 2);
    const Grid2D grid = unit_square(9);
    const GrowthFields g = eval_growth(s, grid);
    for (int n = 0; n < grid.size(); ++n) EXPECT_EQ(g.eps_g(0, 0)[n], 0.5 * grid.x2_of(n) * grid.x2_of(n));
}

TEST(EvalGrowth, RandomCubicMatchesHorner) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    GrowthSpec s;
    double coef[3][3][4][4] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            std::vector<Term> terms;
            for (int p = 0; p <= 3; ++p)
                for (int q = 0; p + q <= 3; ++q) {
                    coef[i][j][p][q] = u(rng);
                    terms.push_back(mono(coef[i][j][p][q], p, q).terms()[0]);
                }
            s.kappa[i][j] = ClosedForm(terms);
        }
    const Grid2D grid(13, 11, {-1.0, 2.0, 0.5, 1.5}, BoundaryMode::DirichletGhost);
    const GrowthFields g = eval_growth(s, grid);
    for (int n = 0; n < grid.size(); ++n) {
        const double x = grid.x1_of(n), y = grid.x2_of(n);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                // Horner in x2 for each power of x1, then Horner in x1.
                double outer = 0.0;
                for (int p = 3; p >= 0; --p) {
                    double inner = 0.0;
                    for (int q = 3 - p; q >= 0; --q) inner = inner * y + coef[i][j][p][q];
                    outer = outer * x + inner;
                }
                EXPECT_NEAR(g.kappa_g(i, j)[n], outer, 1e-15 * (1 + std::abs(outer)) * 8);
            }
    }
}

TEST(LambdaG, Examples) {
    const Grid2D grid = unit_square(16);
    EXPECT_EQ(max_norm(lambda_g(eval_growth(GrowthSpec{}, grid))), 0.0);
    GrowthSpec s;
    s.eps[0][0] = mono(0.5, 0, 2);
    EXPECT_LT(max_error(lambda_g(eval_growth(s, grid)), [](double, double) { return 1.0; }), 1e-8);
    // Compatible strain sym∇w for polynomial w.
    GrowthSpec c;
    c.eps[0][0] = mono(2.0, 1, 1);                     // ∂1 w1, w1 = x1² x2
    c.eps[1][1] = mono(3.0, 0, 2);                     // ∂2 w2, w2 = x2³
    c.eps[0][1] = mono(0.5, 2, 0);                     // ½ ∂2 w1
    c.eps[1][0] = mono(0.5, 2, 0);
    EXPECT_LT(max_norm(lambda_g(eval_growth(c, grid))), 1e-7);
}

TEST(OmegaG, Examples) {
    const Grid2D grid = torus(64);
    EXPECT_EQ(max_norm(omega_g(eval_growth(GrowthSpec{}, grid), 0.3)), 0.0);
    GrowthSpec k;
    k.kappa[0][0] = ClosedForm::constant(1.5);
    k.kappa[0][1] = ClosedForm::constant(-0.5);
    k.kappa[1][1] = ClosedForm::constant(2.0);
    EXPECT_LT(max_norm(omega_g(eval_growth(k, grid), 0.25)), 1e-9);
    // (κ_g)2x2 = ∇²(sin x1): Ω_g = sin x1 for any ν.
    GrowthSpec h;
    h.kappa[0][0] = wv(-1.0, Wave::Sin, 1, 0);
    for (double nu : {0.0, 0.2, 0.45}) {
        const double e = max_error(omega_g(eval_growth(h, grid), nu), [](double x, double) { return std::sin(x); });
        EXPECT_LT(e, 2 * grid.dx() * grid.dx());
    }
    EXPECT_THROW(omega_g(eval_growth(h, grid), 0.5), InputError);
}

TEST(EffectiveGrowth, FlatReferenceLeavesSymmetrizedGrowth) {
    const Grid2D grid = unit_square(9);
    GrowthSpec s;
    s.eps[0][1] = mono(1.0, 1, 0);
    s.kappa[2][0] = mono(2.0, 0, 1);
    const GrowthFields g = eval_growth(s, grid);
    const GrowthFields e = effective_growth(g, ScalarField(grid));
    const MatrixField3 se = symmetric_part(g.eps_g), sk = symmetric_part(g.kappa_g);
    for (int k = 0; k < 9; ++k) {
        EXPECT_EQ(e.eps_g.plane(k), se.plane(k));
        EXPECT_EQ(e.kappa_g.plane(k), sk.plane(k));
    }
}

TEST(EffectiveGrowth, SaddleReference) {
    const Grid2D grid = unit_square(16);
    const GrowthFields e = effective_growth(eval_growth(GrowthSpec{}, grid), sample(mono(1, 1, 1), grid));
    for (int n = 0; n < grid.size(); ++n) {
        const double x = grid.x1_of(n), y = grid.x2_of(n);
        Eigen::Matrix3d eps = Eigen::Matrix3d::Zero(), kap = Eigen::Matrix3d::Zero();
        eps.topLeftCorner<2, 2>() << 0.5 * y * y, 0.5 * x * y, 0.5 * x * y, 0.5 * x * x;
        kap.topLeftCorner<2, 2>() << 0, -1, -1, 0;
        EXPECT_LT((e.eps_g.at(n) - eps).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((e.kappa_g.at(n) - kap).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_EQ(e.eps_g.at(n), e.eps_g.at(n).transpose());
        EXPECT_EQ(e.kappa_g.at(n), e.kappa_g.at(n).transpose());
    }
}

TEST(EffectiveGrowth, ShiftIdentitiesForPresets) {
    GrowthSpec s;
    s.eps[0][0] = wv(0.2, Wave::Sin, 3, 0, Wave::Cos, 2, 0);
    s.kappa[1][1] = wv(0.7, Wave::Cos, 1, 0.2);
    const Grid2D g = unit_square(64);
    const double r2 = resolution(g) * resolution(g);
    for (const ClosedForm& v0 : {mono(1, 1, 1), mono(0.5, 2, 0) + mono(0.5, 0, 2)}) {
        EXPECT_LT(lambda_shift_residual(g, s, v0), r2);
        EXPECT_LT(omega_shift_residual(g, s, v0, 0.3), r2);
    }
    // Smooth non-polynomial v0: second order.
    const ClosedForm v0 = wv(0.4, Wave::Sin, kTwoPi, 0.3, Wave::Cos, kTwoPi, 0.1);
    const double e32 = lambda_shift_residual(unit_square(33), s, v0), e64 = lambda_shift_residual(unit_square(65), s, v0);
    EXPECT_GT(std::log2(e32 / e64), 1.8);
    const double o32 = omega_shift_residual(unit_square(33), s, v0, 0.3), o64 = omega_shift_residual(unit_square(65), s, v0, 0.3);
    EXPECT_GT(std::log2(o32 / o64), 1.8);
}

TEST(Incompatibility, Examples) {
    const Grid2D grid = unit_square(16);
    EXPECT_EQ(incompatibility(eval_growth(GrowthSpec{}, grid)).norm, 0.0);
    GrowthSpec s;
    s.kappa[1][1] = mono(1.0, 1, 0);
    const Incompatibility inc = incompatibility(eval_growth(s, grid));
    EXPECT_NEAR(inc.norm, 1.0, 1e-9);  // |Ω|^{1/2}
    EXPECT_LT((inc.curl.plane(1).array() - 1.0).abs().maxCoeff(), 1e-9);
    EXPECT_LT(inc.curl.plane(0).cwiseAbs().maxCoeff(), 1e-12);
    // Hessian of v = sin x1 cos 2x2: O(dx²).
    GrowthSpec h;
    h.kappa[0][0] = wv(-1, Wave::Sin, 1, 0, Wave::Cos, 2, 0);
    h.kappa[1][1] = wv(-4, Wave::Sin, 1, 0, Wave::Cos, 2, 0);
    h.kappa[0][1] = wv(-2, Wave::Cos, 1, 0, Wave::Sin, 2, 0);
    h.kappa[1][0] = h.kappa[0][1];
    const double n32 = incompatibility(eval_growth(h, torus(32))).norm, n64 = incompatibility(eval_growth(h, torus(64))).norm;
    EXPECT_LT(n64, 10 * torus(64).dx() * torus(64).dx());
    EXPECT_GT(std::log2(n32 / n64), 1.8);
}

TEST(StrainPullback, FlatParametrizationGivesMinor) {
    const Grid2D grid = unit_square(9);
    MatrixField3 m(grid);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 9; ++k)
        for (int n = 0; n < grid.size(); ++n) m.plane(k)[n] = nd(rng);
    const MatrixField2 out = strain_pullback(m, sample(mono(1, 2, 1), grid), 0.0);
    const MatrixField2 minor = minor2(m);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(out.plane(k), minor.plane(k));
}

TEST(StrainPullback, IdentityMetric) {
    const Grid2D grid = unit_square(12);
    MatrixField3 id(grid);
    for (int i = 0; i < 3; ++i) id(i, i).setOnes();
    const ClosedForm v0 = mono(1, 2, 0) + mono(-1, 1, 1);
    const double gamma = 0.3;
    const MatrixField2 out = strain_pullback(id, sample(v0, grid), gamma);
    const auto grad = gradient(sample(v0, grid));
    for (int n = 0; n < grid.size(); ++n) {
        const Eigen::Vector2d gv = grad.at(n);
        const Eigen::Matrix2d expect = Eigen::Matrix2d::Identity() + gamma * gamma * gv * gv.transpose();
        EXPECT_LT((out.at(n) - expect).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(TangentialStrain, VerticalDisplacementOnTiltedPlane) {
    const Grid2D grid = unit_square(12);
    VectorField3 w(grid);
    w(2) = sample(mono(1, 1, 0), grid).values();
    const MatrixField2 out = tangential_strain(w, sample(mono(1, 0, 1), grid), 1.0);
    Eigen::Matrix2d expect;
    expect << 0, 0.5, 0.5, 0;
    for (int n = 0; n < grid.size(); ++n) EXPECT_LT((out.at(n) - expect).cwiseAbs().maxCoeff(), 1e-12);
}
