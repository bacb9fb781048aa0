#pragma once

#include "vkshell/field.hpp"
#include "vkshell/growth.hpp"
#include "vkshell/material.hpp"

#include <optional>

namespace vkshell {

enum class Functional { I40, I41, I4INF };
const char* to_string(Functional f);

/// Plate states (w, v) for I40/I41; shallow states additionally carry ṽ,
/// which parametrizes the stretching B = sym∇w + sym(∇ṽ⊗∇v0).
enum class PlateVariant { Plate, Shallow };

struct PlateState {
    PlateVariant variant;
    ScalarField v;
    VectorField2 w;
    ScalarField vtilde;

    PlateState(const Grid2D& g, PlateVariant var) : variant(var), v(g), w(g), vtilde(g) {}
    static PlateState zero(const Grid2D& g, PlateVariant var) { return PlateState(g, var); }

    const Grid2D& grid() const { return v.grid(); }
    int dof() const;
    /// [v; w1; w2] or [v; w1; w2; ṽ]
    Eigen::VectorXd pack() const;
    void unpack(const Eigen::VectorXd& x);
};

PlateVariant variant_for(Functional f);

struct EnergyTerms {
    double stretching = 0.0;
    double bending = 0.0;
    double penalty = 0.0;
    /// L² norm of cof∇²v0 : ∇²v (I4INF only).
    double constraint_residual = 0.0;

    double functional() const { return stretching + bending; }
    double total() const { return stretching + bending + penalty; }
};

/// Discrete energy ½Σw Q2(S) + (1/24)Σw Q2(M) (+ penalty) for one of the three functionals,
/// with the targets precomputed.  Gradients are exact adjoints of the quadrature sums.
class PlateFunctional {
public:
    PlateFunctional(Functional kind, const GrowthFields& g, const Material& m,
                    std::optional<ScalarField> v0 = std::nullopt, double penalty = 0.0);

    Functional kind() const { return kind_; }
    const Grid2D& grid() const { return grid_; }
    const Material& material() const { return mat_; }
    double penalty() const { return penalty_; }
    void set_penalty(double p);

    EnergyTerms evaluate(const PlateState& s) const;
    /// Returns the total energy; `grad` receives the gradient in PlateState shape.
    double value_and_gradient(const PlateState& s, PlateState& grad) const;
    double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& gx) const;

private:
    struct Strains;
    Strains strains(const PlateState& s) const;
    void check(const PlateState& s) const;

    Functional kind_;
    Grid2D grid_;
    Material mat_;
    double penalty_;
    // Targets: stretching S = sym∇w [+ sym(∇ṽ⊗∇v0)] + ½∇v⊗∇v − eps_hat, bending M = ∇²v + kappa_hat.
    Eigen::VectorXd e11_, e22_, e12_;
    Eigen::VectorXd k11_, k22_, k12_;
    // ∇v0 and cof∇²v0 (I4INF)
    Eigen::VectorXd g1_, g2_;
    Eigen::VectorXd c11_, c22_, c12_;
};

/// ½Σw Q2(S) + (1/24)Σw Q2(M) for strain fields given directly (symmetric parts are used).
EnergyTerms quadrature_energy(const MatrixField2& stretch, const MatrixField2& bend, const Material& m);

double energy_i40(const PlateState& s, const GrowthFields& g, const Material& m);
double energy_i41(const PlateState& s, const GrowthFields& g, const Material& m, const ScalarField& v0);
struct ShallowEnergy {
    double energy;
    double constraint_residual;
};
ShallowEnergy energy_i4inf(const PlateState& s, const GrowthFields& g, const Material& m, const ScalarField& v0,
                           double constraint_penalty);
/// v0 is ignored for I40.
PlateState grad_energy(Functional f, const PlateState& s, const GrowthFields& g, const Material& m,
                       const ScalarField& v0, double constraint_penalty = 0.0);

} // namespace vkshell
