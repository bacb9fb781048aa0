#pragma once

#include "vkshell/closed_form.hpp"
#include "vkshell/field.hpp"

#include <array>

namespace vkshell {

/// Closed-form entries of the stretching (eps) and bending (kappa) growth tensors.
struct GrowthSpec {
    static constexpr int kMaxDegree = 6;
    using Tensor = std::array<std::array<ClosedForm, 3>, 3>;

    Tensor eps;
    Tensor kappa;

    /// Throws SpecError on non-finite coefficients, negative powers or degree > kMaxDegree.
    void validate() const;
    bool is_zero() const;
};

struct GrowthFields {
    MatrixField3 eps_g;
    MatrixField3 kappa_g;

    explicit GrowthFields(const Grid2D& g) : eps_g(g), kappa_g(g) {}
    const Grid2D& grid() const { return eps_g.grid(); }
};

GrowthFields eval_growth(const GrowthSpec& spec, const Grid2D& grid);

/// curl^T curl of (sym eps_g)_2x2.
ScalarField lambda_g(const GrowthFields& g);
/// div^T div of K + nu cof K, K = (sym kappa_g)_2x2.
ScalarField omega_g(const GrowthFields& g, double nu);

/// eps_eff = sym eps_g + ½(∇v0⊗∇v0)*,  kappa_eff = sym kappa_g − (∇²v0)*.
GrowthFields effective_growth(const GrowthFields& g, const ScalarField& v0);

struct Incompatibility {
    VectorField2 curl;
    double norm;
};
/// Row-wise curl of (sym kappa_g)_2x2 and its L² norm.
Incompatibility incompatibility(const GrowthFields& g);

/// Entry (i,j) = ∂_iφ · M ∂_jφ with φ(x) = (x, γ v0(x)).
MatrixField2 strain_pullback(const MatrixField3& m, const ScalarField& v0, double gamma);
/// sym((∇φ)ᵀ ∇W) for a displacement W = (w1, w2, w3) of the graph surface.
MatrixField2 tangential_strain(const VectorField3& w, const ScalarField& v0, double gamma);

template <int R, int C>
TensorField<R, C> symmetric_part(const TensorField<R, C>& m) requires(R == C) {
    TensorField<R, C> out(m.grid());
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j) out(i, j) = i == j ? m(i, j) : Eigen::VectorXd(0.5 * (m(i, j) + m(j, i)));
    return out;
}

} // namespace vkshell
