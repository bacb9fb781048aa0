#include "helpers.hpp"

#include "vkshell/checks.hpp"
#include "vkshell/errors.hpp"
#include "vkshell/material.hpp"
#include "vkshell/operators.hpp"
#include "vkshell/plate_energy.hpp"
#include "vkshell/shell.hpp"
#include "vkshell/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vkshell;
using namespace vkshell::test;

namespace {

PlateState random_state(const Grid2D& g, PlateVariant var, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    PlateState s(g, var);
    for (int n = 0; n < g.size(); ++n) {
        s.v.values()[n] = u(rng);
        s.w.plane(0)[n] = u(rng);
        s.w.plane(1)[n] = u(rng);
        if (var == PlateVariant::Shallow) s.vtilde.values()[n] = u(rng);
    }
    return s;
}

/// Smooth state so that discretization effects are O(dx²).
PlateState smooth_state(const Grid2D& g, PlateVariant var) {
    PlateState s(g, var);
    s.v = sample(wv(0.3, Wave::Sin, 3, 0.2, Wave::Cos, 2, 0.1) + mono(0.2, 2, 1), g);
    s.w.plane(0) = sample(wv(0.1, Wave::Cos, 2, 0, Wave::Sin, 3, 0.4), g).values();
    s.w.plane(1) = sample(mono(0.3, 1, 2), g).values();
    if (var == PlateVariant::Shallow) s.vtilde = sample(wv(0.2, Wave::Sin, 1, 0, Wave::Sin, 2, 0), g);
    return s;
}

GrowthSpec some_growth() {
    GrowthSpec s;
    s.eps[0][0] = wv(0.3, Wave::Sin, 2, 0, Wave::Cos, 1, 0);
    s.eps[0][1] = mono(0.2, 1, 1);
    s.kappa[0][0] = mono(0.5, 1, 0);
    s.kappa[1][1] = wv(-0.4, Wave::Cos, 3, 0.5);
    s.kappa[1][0] = mono(0.1, 0, 2);
    return s;
}

} // namespace

TEST(Material, DerivedConstantsAndValidation) {
    const Material m(1.0, 1.0);
    EXPECT_DOUBLE_EQ(m.nu(), 0.25);
    EXPECT_DOUBLE_EQ(m.young(), 2.5);
    EXPECT_DOUBLE_EQ(m.bending_stiffness(), 2.5 / (12.0 * (1 - 0.0625)));
    EXPECT_DOUBLE_EQ(m.lambda2(), 2.0 / 3.0);
    EXPECT_THROW(Material(0.0, 1.0), InputError);
    EXPECT_THROW(Material(1.0, -0.1), InputError);
}

TEST(Q3, Examples) {
    const Material m(1.0, 1.0);
    EXPECT_EQ(q3(Eigen::Matrix3d::Zero(), m), 0.0);
    Eigen::Matrix3d skew;
    skew << 0, 1, -2, -1, 0, 3, 2, -3, 0;
    EXPECT_NEAR(q3(skew, m), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(q3(Eigen::Matrix3d::Identity(), m), 15.0);
}

TEST(Q3, IsSecondDerivativeOfW) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const Material& m : {Material(1, 1), Material(0.7, 2.3), Material(2, 0)}) {
        Eigen::Matrix3d f;
        for (int k = 0; k < 9; ++k) f(k) = u(rng);
        const double t = 1e-4;
        const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
        const double fd = (density_W(id + t * f, m) - 2 * density_W(id, m) + density_W(id - t * f, m)) / (t * t);
        EXPECT_NEAR(fd, q3(f, m), 1e-6 * q3(f, m));
    }
}

TEST(Q2, Examples) {
    const Material m10(1.0, 0.0), m11(1.0, 1.0);
    const Q2Result z = q2(Eigen::Matrix2d::Zero(), m11);
    EXPECT_EQ(z.value, 0.0);
    EXPECT_EQ(z.c, Eigen::Vector3d::Zero());
    const Q2Result a = q2(Eigen::Matrix2d::Identity(), m10);
    EXPECT_DOUBLE_EQ(a.value, 4.0);
    EXPECT_EQ(a.c, Eigen::Vector3d::Zero());
    const Q2Result b = q2(Eigen::Matrix2d::Identity(), m11);
    EXPECT_NEAR(b.value, 20.0 / 3.0, 1e-14);
    EXPECT_NEAR(b.c(2), -1.0 / 3.0, 1e-15);
    EXPECT_EQ(b.c.head<2>(), Eigen::Vector2d::Zero());
}

TEST(Q2, MatchesIndependentMinimization) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    std::vector<Material> ms;
    for (int k = 0; k < 10; ++k) ms.emplace_back(u(rng), u(rng));
    EXPECT_LT(q2_bruteforce_error(ms, 100, 17), 1e-8);
}

TEST(Q2, BoundedByEveryCompetitorAndLinearMinimizer) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const Material m(0.8, 1.7);
    for (int t = 0; t < 50; ++t) {
        Eigen::Matrix2d f, g;
        f << u(rng), u(rng), u(rng), u(rng);
        g << u(rng), u(rng), u(rng), u(rng);
        const Q2Result r = q2(f, m);
        EXPECT_NEAR(r.value, q2_value(f(0, 0), f(1, 1), 0.5 * (f(0, 1) + f(1, 0)), m), 1e-13 * (1 + r.value));
        Eigen::Matrix3d base = Eigen::Matrix3d::Zero();
        base.topLeftCorner<2, 2>() = f;
        for (int k = 0; k < 5; ++k) {
            const Eigen::Vector3d c(u(rng), u(rng), u(rng));
            const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
            EXPECT_LE(r.value, q3(base + c * e3.transpose() + e3 * c.transpose(), m) + 1e-13);
        }
        const Eigen::Vector3d lin = q2_minimizer(2.0 * f - 3.0 * g, m) - (2.0 * q2_minimizer(f, m) - 3.0 * q2_minimizer(g, m));
        EXPECT_LT(lin.norm(), 1e-13);
    }
}

TEST(WarpingL, Examples) {
    Eigen::Matrix3d f = Eigen::Matrix3d::Zero();
    f.topLeftCorner<2, 2>() << 1, 2, 3, 4;
    EXPECT_EQ(warping_l(f), Eigen::Vector3d::Zero());
    Eigen::Matrix3d e33 = Eigen::Matrix3d::Zero();
    e33(2, 2) = 1;
    EXPECT_EQ(warping_l(e33), Eigen::Vector3d(0, 0, 1));
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 2) = 1;
    g(2, 0) = 2;
    EXPECT_EQ(warping_l(g), Eigen::Vector3d(3, 0, 0));
    // Defining relation sym(F − F2x2*) = sym(l ⊗ e3).
    Eigen::Matrix3d r;
    r << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    Eigen::Matrix3d lhs = r;
    lhs.topLeftCorner<2, 2>().setZero();
    const Eigen::Matrix3d le3 = warping_l(r) * Eigen::Vector3d::UnitZ().transpose();
    EXPECT_LT(((lhs + lhs.transpose()) - (le3 + le3.transpose())).norm(), 1e-14);
}

TEST(EnergyI40, Examples) {
    const Grid2D g = unit_square(33);
    const Material m(1.0, 0.0);
    const GrowthFields zero = eval_growth(GrowthSpec{}, g);
    EXPECT_EQ(energy_i40(PlateState(g, PlateVariant::Plate), zero, m), 0.0);

    GrowthSpec k;
    k.kappa[0][0] = ClosedForm::constant(1.0);
    k.kappa[1][1] = ClosedForm::constant(1.0);
    EXPECT_NEAR(energy_i40(PlateState(g, PlateVariant::Plate), eval_growth(k, g), m), 1.0 / 6.0, 1e-14);

    PlateState s(g, PlateVariant::Plate);
    s.v = sample(mono(0.5, 2, 0), g);
    s.w.plane(0) = sample(mono(-1.0 / 6.0, 3, 0), g).values();
    const EnergyTerms t = PlateFunctional(Functional::I40, zero, m).evaluate(s);
    EXPECT_LT(t.stretching, g.dx() * g.dx());
    EXPECT_NEAR(t.bending, 1.0 / 12.0, g.dx() * g.dx());
}

TEST(EnergyI41, Examples) {
    const Grid2D g = unit_square(33);
    const Material m(1.0, 0.0);
    const GrowthFields zero = eval_growth(GrowthSpec{}, g);
    const ScalarField v0 = sample(mono(1.0, 1, 1), g);

    PlateState rest(g, PlateVariant::Plate);
    rest.v = v0;
    EXPECT_LT(energy_i41(rest, zero, m, v0), 1e-24);

    const double e = energy_i41(PlateState(g, PlateVariant::Plate), zero, m, v0);
    EXPECT_NEAR(e, 7.0 / 45.0 + 1.0 / 6.0, 4 * g.dx() * g.dx());
    const double e2 = energy_i41(PlateState(unit_square(65), PlateVariant::Plate), eval_growth(GrowthSpec{}, unit_square(65)), m,
                                 sample(mono(1.0, 1, 1), unit_square(65)));
    EXPECT_GT(std::abs(e - (7.0 / 45.0 + 1.0 / 6.0)) / std::abs(e2 - (7.0 / 45.0 + 1.0 / 6.0)), 3.2);
}

TEST(EnergyI41, FlatReferenceIsI40Bitwise) {
    const Grid2D g = torus(16);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const Material m(1.3, 0.4);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PlateState s = random_state(g, PlateVariant::Plate, seed);
        EXPECT_EQ(energy_i41(s, gf, m, ScalarField(g)), energy_i40(s, gf, m));
    }
}

TEST(EnergyI4Inf, Examples) {
    const Grid2D g = unit_square(33);
    const Material m(1.0, 0.0);
    const GrowthFields zero = eval_growth(GrowthSpec{}, g);
    const ShallowEnergy z = energy_i4inf(PlateState(g, PlateVariant::Shallow), zero, m, ScalarField(g), 1.0);
    EXPECT_EQ(z.energy, 0.0);
    EXPECT_EQ(z.constraint_residual, 0.0);

    PlateState s(g, PlateVariant::Shallow);
    s.v = sample(mono(1.0, 1, 0), g);
    const ScalarField v0 = sample(mono(0.5, 2, 0) + mono(0.5, 0, 2), g);
    const ShallowEnergy r = energy_i4inf(s, zero, m, v0, 0.0);
    EXPECT_NEAR(r.energy, 0.25, 1e-12);
    EXPECT_LT(r.constraint_residual, g.dx() * g.dx());
    const EnergyTerms t = PlateFunctional(Functional::I4INF, zero, m, v0).evaluate(s);
    EXPECT_NEAR(t.bending, 0.0, 1e-12);
}

TEST(EnergyI4Inf, FlatReferenceCollapses) {
    const Grid2D g = unit_square(16);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const Material m(1.0, 2.0);
    const PlateState p = random_state(g, PlateVariant::Plate, 3);
    PlateState s(g, PlateVariant::Shallow);
    s.v = p.v;
    s.w = p.w;
    const ShallowEnergy e = energy_i4inf(s, gf, m, ScalarField(g), 5.0);
    EXPECT_EQ(e.energy, energy_i40(p, gf, m));
    EXPECT_EQ(e.constraint_residual, 0.0);
    const CollapseGap gap = collapse_gap(g, some_growth(), m, 4, 21);
    EXPECT_LE(gap.i41, 1e-14);
    EXPECT_LE(gap.i4inf, 1e-14);
}

TEST(EnergyI4Inf, PenaltyAddsSquaredResidual) {
    const Grid2D g = unit_square(16);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const Material m(1.0, 1.0);
    const ScalarField v0 = sample(mono(0.5, 2, 0) + mono(0.3, 0, 2), g);
    const PlateState s = smooth_state(g, PlateVariant::Shallow);
    const ShallowEnergy e0 = energy_i4inf(s, gf, m, v0, 0.0), e3 = energy_i4inf(s, gf, m, v0, 3.0);
    EXPECT_NEAR(e3.energy - e0.energy, 3.0 * e0.constraint_residual * e0.constraint_residual, 1e-12 * e3.energy);
}

TEST(GradEnergy, ZeroAtRestWithoutGrowth) {
    const Grid2D g = torus(16);
    const GrowthFields zero = eval_growth(GrowthSpec{}, g);
    const Material m(1, 1);
    for (Functional f : {Functional::I40, Functional::I41, Functional::I4INF}) {
        const PlateState grad = grad_energy(f, PlateState(g, variant_for(f)), zero, m, ScalarField(g), 1.0);
        EXPECT_EQ(grad.pack().cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(GradEnergy, MatchesCentralDifferences) {
    const Grid2D g = unit_square(16);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const Material m(1.0, 0.7);
    const ScalarField v0 = sample(mono(0.5, 2, 0) + mono(0.4, 0, 2) + mono(0.1, 1, 1), g);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd;
    for (Functional f : {Functional::I40, Functional::I41, Functional::I4INF}) {
        const PlateFunctional fn(f, gf, m, v0, 2.0);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const PlateState s = gauge_fix(random_state(g, variant_for(f), 100 + seed, 0.1));
            Eigen::VectorXd x = s.pack(), gx, dir(x.size());
            for (int k = 0; k < dir.size(); ++k) dir[k] = nd(rng);
            fn.value_and_gradient(x, gx);
            const double t = 1e-5;
            Eigen::VectorXd gtmp;
            const double fd = (fn.value_and_gradient(Eigen::VectorXd(x + t * dir), gtmp) -
                               fn.value_and_gradient(Eigen::VectorXd(x - t * dir), gtmp)) /
                              (2 * t);
            EXPECT_NEAR(gx.dot(dir), fd, 1e-6 * std::abs(fd)) << to_string(f);
        }
    }
}

TEST(GradEnergy, OrthogonalToGaugeModes) {
    const Grid2D g = unit_square(16);
    const GrowthFields zero = eval_growth(GrowthSpec{}, g);
    const Material m(1.0, 1.0);
    const PlateState s = gauge_fix(smooth_state(g, PlateVariant::Plate));
    const PlateState grad = grad_energy(Functional::I40, s, zero, m, ScalarField(g));
    const double scale = grad.pack().norm() * s.pack().norm();
    EXPECT_LT(std::abs(grad.v.values().sum()), 1e-10 * scale);
    EXPECT_LT(std::abs(grad.w.plane(0).sum()), 1e-10 * scale);
    EXPECT_LT(std::abs(grad.w.plane(1).sum()), 1e-10 * scale);
    // Infinitesimal von Kármán gauge: δv = b·x, δw = −v b.
    for (const Eigen::Vector2d b : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}) {
        double dot = 0.0;
        for (int n = 0; n < g.size(); ++n) {
            dot += grad.v.values()[n] * (b(0) * g.x1_of(n) + b(1) * g.x2_of(n));
            dot -= s.v.values()[n] * (grad.w.plane(0)[n] * b(0) + grad.w.plane(1)[n] * b(1));
        }
        EXPECT_LT(std::abs(dot), 1e-10 * scale);
    }
}

TEST(Energies, TranslationInvariance) {
    const Grid2D g = unit_square(16);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const Material m(1.0, 1.0);
    const ScalarField v0 = sample(mono(0.5, 2, 0) + mono(0.5, 0, 2), g);
    for (Functional f : {Functional::I40, Functional::I41, Functional::I4INF}) {
        const PlateFunctional fn(f, gf, m, v0, 1.0);
        const PlateState s = smooth_state(g, variant_for(f));
        PlateState t = s;
        t.v.values().array() += 0.7;
        t.w.plane(0).array() -= 1.3;
        t.w.plane(1).array() += 2.1;
        const double e = fn.evaluate(s).total(), et = fn.evaluate(t).total();
        EXPECT_NEAR(e, et, 1e-11 * e) << to_string(f);
    }
}

TEST(Energies, VonKarmanGaugeIsDiscretelyExact) {
    // Centered differences are exact on the affine gauge field, so the discrete stretching is
    // invariant to roundoff (the continuous statement only needs O(dx²)).
    for (int n : {17, 33}) {
        const Grid2D g = unit_square(n);
        const GrowthFields gf = eval_growth(some_growth(), g);
        const Material m(1.0, 1.0);
        const PlateState s = smooth_state(g, PlateVariant::Plate);
        const Eigen::Vector2d b(0.3, -0.2);
        PlateState t = s;
        for (int k = 0; k < g.size(); ++k) {
            const double bx = b(0) * g.x1_of(k) + b(1) * g.x2_of(k);
            t.v.values()[k] += bx;
            for (int i = 0; i < 2; ++i) t.w.plane(i)[k] += -s.v.values()[k] * b(i) - 0.5 * bx * b(i);
        }
        const double e = energy_i40(s, gf, m);
        EXPECT_NEAR(energy_i40(t, gf, m), e, 1e-12 * e);
    }
}

TEST(Energies, Nonnegative) {
    const Grid2D g = unit_square(12);
    const GrowthFields gf = eval_growth(some_growth(), g);
    const ScalarField v0 = sample(mono(0.5, 2, 0) + mono(-0.5, 0, 2), g);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Material m(0.1 + seed, 0.5 * seed);
        EXPECT_GE(energy_i40(random_state(g, PlateVariant::Plate, seed), gf, m), 0.0);
        EXPECT_GE(energy_i41(random_state(g, PlateVariant::Plate, seed), gf, m, v0), 0.0);
        EXPECT_GE(energy_i4inf(random_state(g, PlateVariant::Shallow, seed), gf, m, v0, 0.5).energy, 0.0);
    }
}

TEST(Energies, VariantMismatchIsRejected) {
    const Grid2D g = unit_square(12);
    const GrowthFields gf = eval_growth(GrowthSpec{}, g);
    const Material m(1, 1);
    EXPECT_ANY_THROW(energy_i40(PlateState(g, PlateVariant::Shallow), gf, m));
    EXPECT_ANY_THROW(energy_i4inf(PlateState(g, PlateVariant::Plate), gf, m, ScalarField(g), 1.0));
    EXPECT_THROW(energy_i40(PlateState(unit_square(16), PlateVariant::Plate), gf, m), ShapeError);
}
