#include "helpers.hpp"

#include "vkshell/errors.hpp"
#include "vkshell/operators.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace vkshell;
using namespace vkshell::test;

TEST(Grid, SpacingFollowsBoundaryMode) {
    const Grid2D p = torus(16);
    EXPECT_DOUBLE_EQ(p.dx(), kTwoPi / 16);
    const Grid2D d = unit_square(11);
    EXPECT_DOUBLE_EQ(d.dx(), 0.1);
    EXPECT_DOUBLE_EQ(d.x1(10), 1.0);
}

TEST(Grid, RejectsTooFewNodes) {
    EXPECT_THROW(Grid2D(4, 16, {}, BoundaryMode::Periodic), SizingError);
    EXPECT_THROW(Grid2D(16, 7, {}, BoundaryMode::DirichletGhost), SizingError);
    EXPECT_NO_THROW(Grid2D(8, 8, {}, BoundaryMode::DirichletGhost));
}

TEST(Grid, RejectsDegenerateDomain) {
    EXPECT_ANY_THROW(Grid2D(16, 16, {0.0, 0.0, 0.0, 1.0}, BoundaryMode::Periodic));
}

TEST(Field, MismatchedGridsThrowShapeError) {
    ScalarField a(torus(16)), b(torus(32));
    EXPECT_THROW(a += b, ShapeError);
    EXPECT_THROW(airy_bracket(a, b), ShapeError);
}

TEST(Field, CsvRoundTripIsExact) {
    const Grid2D g = unit_square(9);
    MatrixField2 m(g);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 4; ++k)
        for (int n = 0; n < g.size(); ++n) m.plane(k)[n] = nd(rng);
    std::stringstream ss;
    write_csv(ss, m);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    EXPECT_EQ(header, "x1,x2,c11,c12,c21,c22");
    const MatrixField2 back = read_csv<2, 2>(ss, g);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(back.plane(k), m.plane(k));
}

TEST(ApplyDiff, ConstantGivesZeroForEveryKind) {
    for (const Grid2D& g : {torus(16), unit_square(16)}) {
        const ScalarField c = sample(ClosedForm::constant(2.5), g);
        EXPECT_LT(max_norm(laplacian(c)), 1e-10);
        EXPECT_LT(max_norm(bilaplacian(c)), 1e-6);
        const auto grad = gradient(c);
        EXPECT_LT(grad.plane(0).cwiseAbs().maxCoeff() + grad.plane(1).cwiseAbs().maxCoeff(), 1e-12);
        const auto hess = std::get<MatrixField2>(apply_diff(c, DiffKind::Hessian));
        for (int k = 0; k < 4; ++k) EXPECT_LT(hess.plane(k).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ApplyDiff, HessianOfBilinearIsExact) {
    const Grid2D g = unit_square(16);
    const MatrixField2 h = hessian(sample(mono(1.0, 1, 1), g));
    for (int n = 0; n < g.size(); ++n) {
        EXPECT_NEAR(h.plane(0)[n], 0.0, 1e-9);
        EXPECT_NEAR(h.plane(1)[n], 1.0, 1e-9);
        EXPECT_NEAR(h.plane(2)[n], 1.0, 1e-9);
        EXPECT_NEAR(h.plane(3)[n], 0.0, 1e-9);
    }
}

TEST(ApplyDiff, LaplacianOfSineProductIsSecondOrder) {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = torus(n);
        const ScalarField lap = laplacian(sample(wv(1, Wave::Sin, 1, 0, Wave::Sin, 1, 0), g));
        const double e = max_error(lap, [](double x, double y) { return -2.0 * std::sin(x) * std::sin(y); });
        EXPECT_LT(e, g.dx() * g.dx());
        if (prev > 0) EXPECT_NEAR(prev / e, 4.0, 0.8);
        prev = e;
    }
}

TEST(ApplyDiff, BilaplacianIsLaplacianComposed) {
    for (const Grid2D& g : {torus(16), unit_square(16)}) {
        const ScalarField f = sample(wv(1, Wave::Sin, 1.3, 0.2, Wave::Cos, 0.7, 0.1) + mono(0.3, 3, 1), g);
        EXPECT_EQ(bilaplacian(f).values(), laplacian(laplacian(f)).values());
    }
}

TEST(CurlTCurl, DiagonalQuadraticGivesOne) {
    const Grid2D g = unit_square(16);
    MatrixField2 b(g);
    b.plane(0) = sample(mono(0.5, 0, 2), g).values();
    EXPECT_LT(max_error(curl_t_curl(b), [](double, double) { return 1.0; }), 1e-8);
}

TEST(CurlTCurl, HalfOuterGradientOfSaddleGivesMinusDet) {
    const Grid2D g = unit_square(16);
    const auto grad = gradient(sample(mono(1.0, 1, 1), g));
    const MatrixField2 b = outer(grad, grad);
    MatrixField2 half = b;
    half *= 0.5;
    EXPECT_LT(max_error(curl_t_curl(half), [](double, double) { return 1.0; }), 1e-8);
}

TEST(CurlTCurl, KillsSymmetricGradientsToSecondOrder) {
    const ClosedForm w1 = wv(1, Wave::Sin, 1, 0, Wave::Cos, 2, 0.3), w2 = wv(1, Wave::Cos, 1, 0.5, Wave::Sin, 1, 0);
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = torus(n);
        VectorField2 w(g);
        w.plane(0) = sample(w1, g).values();
        w.plane(1) = sample(w2, g).values();
        const double e = max_norm(curl_t_curl(sym(jacobian(w))));
        if (prev > 0) EXPECT_GT(std::log2(prev / e), 1.8);
        prev = e;
    }
    // Quadratic entries: exact up to roundoff.
    const Grid2D g = unit_square(16);
    VectorField2 w(g);
    w.plane(0) = sample(mono(1.0, 2, 0) + mono(-0.5, 1, 1), g).values();
    w.plane(1) = sample(mono(0.7, 0, 2) + mono(2.0, 1, 1), g).values();
    EXPECT_LT(max_norm(curl_t_curl(sym(jacobian(w)))), 1e-8);
}

TEST(DivTDiv, ConstantGivesZero) {
    const Grid2D g = unit_square(12);
    MatrixField2 b(g);
    for (int k = 0; k < 4; ++k) b.plane(k).setConstant(1.0 + k);
    EXPECT_LT(max_norm(div_t_div(b)), 1e-9);
}

TEST(DivTDiv, CofactorHessianIsDivergenceFree) {
    const ClosedForm v0 = wv(1, Wave::Sin, 1, 0, Wave::Sin, 1, 0);
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = torus(n);
        const double e = max_norm(div_t_div(cof2(hessian(sample(v0, g)))));
        EXPECT_LT(e, g.dx() * g.dx());
        if (prev > 0) EXPECT_GT(std::log2(prev / e), 1.8);
        prev = e;
    }
}

TEST(DivTDiv, HessianOfSineGivesBilaplacian) {
    const Grid2D g = torus(64);
    const double e = max_error(div_t_div(hessian(sample(wv(1, Wave::Sin, 1, 0), g))), [](double x, double) { return std::sin(x); });
    EXPECT_LT(e, 2.0 * g.dx() * g.dx());
}

TEST(Cofactor, ClosedFormsAndIdentity) {
    const Grid2D g = unit_square(8);
    MatrixField2 id(g), swap(g);
    id.plane(0).setOnes();
    id.plane(3).setOnes();
    swap.plane(1).setOnes();
    swap.plane(2).setOnes();
    EXPECT_EQ(cof2(id).at(0), Eigen::Matrix2d::Identity());
    EXPECT_DOUBLE_EQ(det2(id).values()[0], 1.0);
    Eigen::Matrix2d expect;
    expect << 0, -1, -1, 0;
    EXPECT_EQ(cof2(swap).at(3), expect);
    EXPECT_DOUBLE_EQ(det2(swap).values()[3], -1.0);

    MatrixField2 r(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 4; ++k)
        for (int n = 0; n < g.size(); ++n) r.plane(k)[n] = u(rng);
    const ScalarField lhs = contract(cof2(r), r), det = det2(r);
    for (int n = 0; n < g.size(); ++n) EXPECT_NEAR(lhs.values()[n], 2.0 * det.values()[n], 1e-14 * (1 + std::abs(lhs.values()[n])));
}

TEST(AiryBracket, ExamplesAndSymmetry) {
    const Grid2D g = unit_square(16);
    EXPECT_LT(max_error(airy_bracket(sample(mono(1, 2, 0), g), sample(mono(1, 0, 2), g)), [](double, double) { return 4.0; }), 1e-7);
    const ScalarField s = sample(mono(1, 1, 1), g);
    EXPECT_LT(max_error(airy_bracket(s, s), [](double, double) { return -2.0; }), 1e-7);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    ScalarField a(g), b(g);
    for (int n = 0; n < g.size(); ++n) a.values()[n] = nd(rng), b.values()[n] = nd(rng);
    EXPECT_EQ(airy_bracket(a, b).values(), airy_bracket(b, a).values());
    const ScalarField twice_det = 2.0 * det2(hessian(a));
    EXPECT_LT(max_norm(airy_bracket(a, a) - twice_det), 1e-9 * max_norm(twice_det));
}

TEST(AiryBracket, SineAgainstCosineIsSecondOrder) {
    auto err = [](int n) {
        const Grid2D g = torus(n);
        const ScalarField r = airy_bracket(sample(wv(1, Wave::Sin, 1, 0, Wave::Sin, 1, 0), g), sample(wv(1, Wave::Cos, 1, 0), g));
        // cof∇²v : ∇²Φ with Φ = cos x1: v22 Φ11 = sin x1 sin x2 cos x1
        return max_error(r, [](double x, double y) { return std::sin(x) * std::sin(y) * std::cos(x); });
    };
    const double e32 = err(32), e64 = err(64);
    EXPECT_LT(e64, torus(64).dx() * torus(64).dx());
    EXPECT_GT(std::log2(e32 / e64), 1.8);
}

TEST(Integrate, ExamplesAndQuadrature) {
    EXPECT_NEAR(integrate(sample(ClosedForm::constant(1.0), unit_square(9))), 1.0, 1e-15);
    EXPECT_EQ(integrate(ScalarField(unit_square(9))), 0.0);
    const ScalarField s2 = sample(wv(0.5, Wave::One, 0, 0) + wv(-0.5, Wave::Cos, 2, 0), torus(32));  // sin² x1
    EXPECT_NEAR(integrate(s2), 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(Field, AsymmetryOfHessianIsZero) {
    const MatrixField2 h = hessian(sample(wv(1, Wave::Sin, 1, 0.1, Wave::Cos, 2, 0.4), torus(16)));
    EXPECT_EQ(asymmetry(h), 0.0);
}

TEST(Field, NonFiniteSamplesAreRejected) {
    ScalarField f(torus(8));
    f.values()[3] = std::nan("");
    EXPECT_THROW(require_finite(f, "test"), InputError);
}
