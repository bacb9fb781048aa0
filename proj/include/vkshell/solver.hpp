#pragma once

#include "vkshell/plate_energy.hpp"

#include <string>
#include <vector>

namespace vkshell {

struct SolveReport {
    int iterations = 0;
    double final_energy = 0.0;
    double grad_norm = 0.0;
    double constraint_residual = 0.0;
    bool converged = false;
    double wall_time_s = 0.0;
    std::string message;
    /// Energies after each accepted step (minimize) or joint residuals per sweep (solve_vk).
    std::vector<double> history;
    /// Constraint residual at the end of each penalty stage (I4INF only).
    std::vector<double> stage_residuals;
};

/// Quotient out the rigid / infinitesimal-rigid modes: means of v, w, ṽ; the affine part of v
/// (with the compensating von Kármán update of w) and the mean infinitesimal rotation of w.
/// On periodic grids only the constant modes exist and only those are removed.
PlateState gauge_fix(const PlateState& s);

struct BiharmonicResult {
    ScalarField u;
    /// Relative residual ‖Δ²u − rhs‖/‖rhs‖ of the discrete operator that was inverted.
    double relative_residual;
    /// Mean removed from rhs before solving (periodic only).
    double projected_mean;
    int iterations;
};

/// Periodic: Δ²u = rhs − mean(rhs) with zero-mean u.  Dirichlet: Navier conditions u = Δu = 0 on the
/// boundary nodes, interior equation with the 5-point Laplacian composed twice.
BiharmonicResult solve_biharmonic(const ScalarField& rhs, double tol = 1e-10, int max_iter = 10000);

struct MysteryResult {
    ScalarField v;
    VectorField2 w;
    double linear_residual;
    int iterations;
    bool symmetric_operator;
};

/// cof∇²v0 : ∇²v = −curlᵀcurl B in the interior, v = 0 on the boundary, then w from the
/// (compatible) strain B − sym(∇v⊗∇v0) by line integration from the corner (x1 first, then x2).
/// Requires a dirichlet-ghost grid and det∇²v0 > 0 at every node.
MysteryResult solve_mystery(const ScalarField& v0, const MatrixField2& b, double tol = 1e-10, int max_iter = 10000);

struct PenaltySchedule {
    double initial = 1.0;
    double factor = 2.0;
    int stages = 6;
};

struct MinimizeOptions {
    /// Euclidean gradient-norm tolerance; negative selects 1e-8·(1 + |E0|).
    double tol = -1.0;
    int max_iter = 10000;
    int memory = 10;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    PenaltySchedule penalty;
};

struct MinimizeResult {
    PlateState state;
    SolveReport report;
};

/// Preconditioned limited-memory BFGS with backtracking; I4INF runs the penalty schedule,
/// warm-starting each stage.  Output is gauge-fixed.
MinimizeResult minimize(Functional f, const PlateState& init, const GrowthFields& g, const Material& m,
                        const ScalarField& v0, const MinimizeOptions& opts = {});

enum class VKModel { Old, New };
const char* to_string(VKModel m);

struct VKState {
    ScalarField v;
    ScalarField phi;
    explicit VKState(const Grid2D& g) : v(g), phi(g) {}
};

struct VKOptions {
    double relaxation = 0.7;
    double tol = 1e-9;
    int max_sweeps = 500;
    int divergence_window = 5;
};

struct VKResult {
    VKState state;
    SolveReport report;
};

struct VKResidual {
    double r1;
    double r2;
};

/// Picard iteration on the periodic torus: Φ from v, then v from Φ (under-relaxed).
VKResult solve_vk(VKModel model, const GrowthFields& g, const Material& m, const ScalarField& v0,
                  const VKOptions& opts = {});
/// L² norms of the mean-projected residuals of both equations.
VKResidual vk_residual(const VKState& s, VKModel model, const GrowthFields& g, const Material& m,
                       const ScalarField& v0);

} // namespace vkshell
