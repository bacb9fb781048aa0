#pragma once

#include "vkshell/closed_form.hpp"
#include "vkshell/growth.hpp"
#include "vkshell/material.hpp"
#include "vkshell/plate_energy.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace vkshell {

/// Gauss–Legendre nodes and weights on [−1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Thin shell around the graph of γ v0, γ = h^α.
struct ShellConfig {
    ClosedForm v0;
    double alpha = 1.0;
    double h = 0.1;
    int n_t = 5;

    double gamma() const;
    /// Throws InputError unless n_t is odd ≥ 3, 0 < h ≤ 0.2·min extent and γ‖∇v0‖∞ < 1 on the grid nodes.
    void validate(const Grid2D& grid) const;
};

/// Regime of the Γ-limit hierarchy selected by α and v0.
enum class Regime { Flat, Critical, Shallow };
Regime regime_for(const ShellConfig& cfg);
Functional limit_functional(Regime r);
const char* to_string(Regime r);

/// φγ(x) = (x, γv0(x)) and its unit normal (−γ∇v0, 1)/√(1+γ²|∇v0|²).
struct Immersion {
    VectorField3 phi;
    VectorField3 normal;
};
Immersion immersion(const ShellConfig& cfg, const Grid2D& grid);
/// φ̃(x, x3) = φγ(x) + x3 n(x)
Eigen::Vector3d immersion_point(const ShellConfig& cfg, double x1, double x2, double x3);
/// Columns ∂1φ̃, ∂2φ̃, n at (x, x3).
Eigen::Matrix3d immersion_gradient(const ShellConfig& cfg, double x1, double x2, double x3);

/// q^h = Id + h²ε_g + h x3 κ_g at node n.  Throws InputError if det q ≤ 0.
Eigen::Matrix3d growth_qh(const GrowthFields& g, const ShellConfig& cfg, int node, double x3);

/// (μ/4)|FᵀF − I|² + (λ/8)(tr(FᵀF − I))²
double density_W(const Eigen::Matrix3d& f, const Material& m);

/// Metric pullback g^h = (∇φ̃)ᵀ(qᵀq)(∇φ̃) at (x, x3) for the α = 1 shell of thickness h, and its
/// second-order expansion Id + h²(2 sym ε + (∇v0⊗∇v0)*) + 2h x3 (sym κ − (∇²v0)*).
Eigen::Matrix3d metric_pullback(const GrowthSpec& g, const ClosedForm& v0, double h, double x1, double x2, double x3);
Eigen::Matrix3d metric_expansion(const GrowthSpec& g, const ClosedForm& v0, double h, double x1, double x2,
                                 double x3);
/// max over nodes and x3 ∈ {±h/2, ±h/4, 0} of |g^h − expansion|.
double metric_residual(const GrowthSpec& g, const ClosedForm& v0, double h, const Grid2D& grid);

/// Closed-form 2D state of the recovery sequence.
struct RecoveryState {
    ClosedForm v;
    std::array<ClosedForm, 2> w;
    ClosedForm vtilde;
};

/// Deformation sampled at every (node, Gauss point); index n * n_t + k.
struct Deformation3D {
    Grid2D grid;
    int n_t;
    double h;
    std::vector<double> x3;
    std::vector<double> gauss_w;   // sums to h
    std::vector<Eigen::Vector3d> u;
    std::vector<Eigen::Matrix3d> grad_flat;  // ∂(y)/∂(x1, x2, x3)
    std::vector<Eigen::Matrix3d> grad;       // ∇u = grad_flat · (∇φ̃)⁻¹
    std::vector<double> jac;                 // det ∇φ̃
    /// Pulled-back growth a = Id + h²(sym ε + ½(∇v0⊗∇v0)*) + h x3 (sym κ − (∇²v0)*), α = 1 only.
    std::vector<Eigen::Matrix3d> a_pull;

    explicit Deformation3D(const Grid2D& g) : grid(g), n_t(0), h(0.0) {}
    int points() const { return static_cast<int>(u.size()); }
};

/// Identity map of the reference shell, u = φ̃.
Deformation3D identity_deformation(const ShellConfig& cfg, const Grid2D& grid);
/// R u + c
Deformation3D rigid_motion(const Deformation3D& d, const Eigen::Matrix3d& r, const Eigen::Vector3d& c);

enum class EnergyRoute { Direct, PulledBack };

struct Energy3D {
    double value = 0.0;
    /// Points with det ∇u ≤ 0.
    int inverted_points = 0;
    /// Points with dist(∇u q⁻¹, SO(3)) > 0.3.
    int far_points = 0;
    double max_dist_so3 = 0.0;
};

/// (1/h) ∫ W(∇u q⁻¹) det∇φ̃ over nodes × Gauss points (compensated sums).
Energy3D energy_3d(const Deformation3D& u, const GrowthFields& g, const ShellConfig& cfg, const Material& m,
                   EnergyRoute route = EnergyRoute::Direct);

/// Regime strains of the limit: stretching S and bending M = ∇²v + κ̂ (exact derivatives).
struct LimitStrains {
    MatrixField2 stretch;
    MatrixField2 bend;
    explicit LimitStrains(const Grid2D& g) : stretch(g), bend(g) {}
};
LimitStrains limit_strains(const RecoveryState& s, const GrowthSpec& g, const ShellConfig& cfg, const Grid2D& grid);

/// Recovery deformation: y = y0 + x3(N + h²d0) + ½x3² h d1, N the unit normal of y0,
/// d0, d1 the warping vectors built from l(·) and the Q2 minimizer.
Deformation3D build_recovery(const RecoveryState& s, const GrowthSpec& g, const ShellConfig& cfg,
                             const Material& m, const Grid2D& grid);

struct ScalingRow {
    double h, gamma, e3d, e3d_over_h4, e2d_limit, ratio;
};

struct ScalingTable {
    Regime regime;
    double alpha;
    std::vector<ScalingRow> rows;
    double incompatibility_norm;
    /// Limit functional on the grid-sampled state with finite-difference derivatives.
    double e2d_fd;
    int inverted_points = 0;
    int far_points = 0;
};

ScalingTable scaling_study(double alpha, const std::vector<double>& h_list, const GrowthSpec& g,
                           const ClosedForm& v0, const RecoveryState& state, const Material& m, const Grid2D& grid,
                           int n_t = 5, EnergyRoute route = EnergyRoute::Direct, int threads = 1);

} // namespace vkshell
