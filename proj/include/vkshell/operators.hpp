#pragma once

#include "vkshell/field.hpp"

#include <variant>

namespace vkshell {

enum class DiffKind { Grad, Hessian, Laplacian, Bilaplacian };

using DiffResult = std::variant<ScalarField, VectorField2, MatrixField2>;

/// Apply the grid's stencils to a plane of node values.
Eigen::VectorXd d1(const Grid2D& g, const Eigen::VectorXd& u);
Eigen::VectorXd d2(const Grid2D& g, const Eigen::VectorXd& u);
Eigen::VectorXd d11(const Grid2D& g, const Eigen::VectorXd& u);
Eigen::VectorXd d22(const Grid2D& g, const Eigen::VectorXd& u);
Eigen::VectorXd d12(const Grid2D& g, const Eigen::VectorXd& u);

VectorField2 gradient(const ScalarField& f);
/// Symmetric by construction (single cross stencil fills both off-diagonal slots).
MatrixField2 hessian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
/// Exactly laplacian composed with laplacian.
ScalarField bilaplacian(const ScalarField& f);
/// Row i holds the gradient of component i.
MatrixField2 jacobian(const VectorField2& w);
DiffResult apply_diff(const ScalarField& f, DiffKind kind);

/// d22 B11 + d11 B22 - d12 (B12 + B21)
ScalarField curl_t_curl(const MatrixField2& b);
/// d11 B11 + d22 B22 + d12 (B12 + B21)
ScalarField div_t_div(const MatrixField2& b);
/// Row-wise curl: (d1 B_i2 - d2 B_i1)_i.
VectorField2 row_curl(const MatrixField2& b);

MatrixField2 cof2(const MatrixField2& b);
ScalarField det2(const MatrixField2& b);
/// Pointwise Frobenius product A : B.
ScalarField contract(const MatrixField2& a, const MatrixField2& b);
/// cof Hess(v) : Hess(phi)
ScalarField airy_bracket(const ScalarField& v, const ScalarField& phi);

MatrixField2 sym(const MatrixField2& b);
/// a ⊗ b, i.e. entry (i,j) = a_i b_j.
MatrixField2 outer(const VectorField2& a, const VectorField2& b);
/// Principal 2×2 minor.
MatrixField2 minor2(const MatrixField3& m);
/// Embed as the principal minor of an otherwise-zero 3×3 field.
MatrixField3 embed3(const MatrixField2& m);

double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField2& f);
double max_norm(const ScalarField& f);
/// Max-norm restricted to nodes at least `band` cells from the boundary (all nodes if periodic).
double interior_max_norm(const ScalarField& f, int band);

} // namespace vkshell
