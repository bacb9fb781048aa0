#pragma once

// Residuals of the structural identities that the discrete operators, growth sources, energies
// and shell metric must satisfy.  Shared by `vkshell verify` and the acceptance driver.

#include "vkshell/closed_form.hpp"
#include "vkshell/growth.hpp"
#include "vkshell/material.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vkshell {

/// Dirichlet-ghost grids are compared on nodes at least this many cells from the boundary.
inline constexpr int kInteriorBand = 3;

/// Smooth trigonometric test functions adapted to a domain (periodic on it); index 0..3.
ClosedForm test_function(const Box& domain, int which);
/// k·max(dx, dy) with k = 2π / shortest side: the dimensionless resolution of the test catalog.
double resolution(const Grid2D& g);

/// Same domain and boundary mode with (nx, ny) scaled by num/den.
Grid2D rescaled(const Grid2D& g, int num, int den);

/// max |curlᵀcurl sym(∇v3⊗∇v0) + cof∇²v0 : ∇²v3| relative to max |cof∇²v0 : ∇²v3| (exact).
double cofactor_contraction_residual(const Grid2D& g, const ClosedForm& v0, const ClosedForm& v3);
/// max |curlᵀcurl sym∇w| relative to the largest exact third derivative of w.
double sym_grad_kernel_residual(const Grid2D& g, const ClosedForm& w1, const ClosedForm& w2);
/// max |divᵀdiv cof∇²v0| relative to max |Δ²v0| (exact).
double cofactor_divergence_residual(const Grid2D& g, const ClosedForm& v0);
/// max |[v, φ] − [φ, v]|
double bracket_asymmetry(const Grid2D& g, const ClosedForm& v, const ClosedForm& phi);

/// max |λ_g(eff) − (λ_g − det∇²v0)| with det∇²v0 exact, relative to max |∇²v0|².
double lambda_shift_residual(const Grid2D& g, const GrowthSpec& growth, const ClosedForm& v0);
/// max |Ω_g(eff) − (Ω_g − Δ²v0)| with Δ²v0 exact, relative to the largest of |∇²v0| and the fourth derivatives.
double omega_shift_residual(const Grid2D& g, const GrowthSpec& growth, const ClosedForm& v0, double nu);

/// max |curlᵀcurl(B − sym(∇v⊗∇v0))| over the central half of the domain (nodes at least a quarter
/// of the shorter side from the boundary).  The Dirichlet solution has corner singularities whenever
/// curlᵀcurl B does not vanish at the corners, so a band of fixed cell width does not converge.
double decomposition_residual(const MatrixField2& b, const ScalarField& v0, const ScalarField& v);

/// Largest relative gap between q2 and an independent minimization of Q3 over the normal
/// completion c (quadratic fit of Q3 from point evaluations), over `inputs` random F per material.
double q2_bruteforce_error(const std::vector<Material>& materials, int inputs, std::uint64_t seed);

struct CollapseGap {
    double i41 = 0.0;    // max |I41 − I40| / max(|I40|, tiny)
    double i4inf = 0.0;  // same for I4INF
};
/// I41 and I4INF against I40 at v0 ≡ 0 on `states` random states.
CollapseGap collapse_gap(const Grid2D& g, const GrowthSpec& growth, const Material& m, int states,
                         std::uint64_t seed);

/// Least-squares slope of log r against log x (NaN unless all values are positive).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& r);

} // namespace vkshell
