#include "vkshell/solver.hpp"

#include "vkshell/operators.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <cmath>
#include <vector>

namespace vkshell {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

constexpr double kInnerTol = 1e-13;
constexpr double kBiharmonicPost = 1e-8;

/// Rows and columns of `op` restricted to the listed nodes; columns outside are dropped
/// (homogeneous Dirichlet data).
ColSparse restrict_to(const SparseOp& op, const std::vector<int>& nodes, int n_total) {
    std::vector<int> local(n_total, -1);
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) local[nodes[k]] = k;
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
        for (SparseOp::InnerIterator it(op, nodes[k]); it; ++it) {
            const int c = local[it.col()];
            if (c >= 0) trip.emplace_back(k, c, it.value());
        }
    }
    ColSparse m(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(nodes.size()));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

std::vector<int> interior_nodes(const Grid2D& g) {
    std::vector<int> nodes;
    for (int n = 0; n < g.size(); ++n)
        if (g.boundary_distance(n) >= 1) nodes.push_back(n);
    return nodes;
}

void project_mean(Eigen::VectorXd& u, const Grid2D& g) {
    u.array() -= g.weights().dot(u) / g.weights().sum();
}

/// Solves (−L) x = −b by CG; throws if the relative residual misses `tol` after max_iter.
struct PoissonSolver {
    ColSparse neg_lap;
    Eigen::ConjugateGradient<ColSparse, Eigen::Lower | Eigen::Upper> cg;
    int iterations = 0;

    PoissonSolver(ColSparse lap, int max_iter) : neg_lap(-lap) {
        cg.setTolerance(kInnerTol);
        cg.setMaxIterations(max_iter);
        cg.compute(neg_lap);
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b, const Eigen::VectorXd& guess) {
        Eigen::VectorXd x = cg.solveWithGuess(-b, guess);
        iterations += static_cast<int>(cg.iterations());
        if (cg.info() != Eigen::Success && cg.error() > 1e3 * kInnerTol)
            throw SolverError("conjugate gradient did not converge in the Poisson solve", cg.error());
        return x;
    }
};

} // namespace

BiharmonicResult solve_biharmonic(const ScalarField& rhs, double tol, int max_iter) {
    require_finite(rhs, "solve_biharmonic");
    const auto& g = rhs.grid();
    BiharmonicResult out{ScalarField(g), 0.0, 0.0, 0};

    if (g.periodic()) {
        Eigen::VectorXd b = rhs.values();
        out.projected_mean = g.weights().dot(b) / g.weights().sum();
        b.array() -= out.projected_mean;
        const double bn = b.norm();
        if (bn == 0.0) return out;

        PoissonSolver ps(ColSparse(g.ops().lap), max_iter);
        const ColSparse bilap(g.ops().bilap);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(g.size());
        Eigen::VectorXd r = b;
        // Two nested Poisson solves, then iterative refinement on the composed residual.
        for (int pass = 0; pass < 6; ++pass) {
            Eigen::VectorXd z = ps.solve(r, Eigen::VectorXd::Zero(g.size()));
            project_mean(z, g);
            Eigen::VectorXd du = ps.solve(z, Eigen::VectorXd::Zero(g.size()));
            project_mean(du, g);
            u += du;
            r = b - bilap * u;
            r.array() -= g.weights().dot(r) / g.weights().sum();
            out.relative_residual = (bilap * u - b).norm() / bn;
            if (out.relative_residual <= tol) break;
        }
        out.iterations = ps.iterations;
        out.u.values() = u;
    } else {
        const auto nodes = interior_nodes(g);
        const ColSparse lap = restrict_to(g.ops().lap, nodes, g.size());
        Eigen::VectorXd b(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k) b[k] = rhs.values()[nodes[k]];
        const double bn = b.norm();
        if (bn == 0.0) return out;

        PoissonSolver ps(lap, max_iter);
        const ColSparse bilap = lap * lap;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(b.size());
        Eigen::VectorXd r = b;
        for (int pass = 0; pass < 6; ++pass) {
            const Eigen::VectorXd z = ps.solve(r, Eigen::VectorXd::Zero(b.size()));
            u += ps.solve(z, Eigen::VectorXd::Zero(b.size()));
            r = b - bilap * u;
            out.relative_residual = r.norm() / bn;
            if (out.relative_residual <= tol) break;
        }
        out.iterations = ps.iterations;
        for (std::size_t k = 0; k < nodes.size(); ++k) out.u.values()[nodes[k]] = u[k];
    }
    if (!(out.relative_residual <= kBiharmonicPost))
        throw SolverError("biharmonic solve missed its residual target", out.relative_residual);
    return out;
}

MysteryResult solve_mystery(const ScalarField& v0, const MatrixField2& b, double tol, int max_iter) {
    require_same_grid(v0.grid(), b.grid(), "solve_mystery");
    require_finite(v0, "solve_mystery v0");
    require_finite(b, "solve_mystery B");
    const auto& g = v0.grid();
    if (g.periodic()) throw InputError("solve_mystery: needs a dirichlet-ghost grid (v = 0 on the boundary)");

    const auto h0 = hessian(v0);
    const auto det = det2(h0);
    const double min_det = det.values().minCoeff();
    if (!(min_det > 0.0))
        throw InputError("solve_mystery: reference shape is not elliptic (min det∇²v0 = " + std::to_string(min_det) +
                         ")");
    const auto c = cof2(h0);

    // Interior rows of cof∇²v0 : D² = c11 D11 + c22 D22 + 2 c12 D12.
    const auto& op = g.ops();
    SparseOp full = SparseOp(c(0, 0).asDiagonal() * op.d11) + SparseOp(c(1, 1).asDiagonal() * op.d22) +
                    SparseOp((2.0 * c(0, 1)).asDiagonal() * op.d12);
    const auto nodes = interior_nodes(g);
    ColSparse a = restrict_to(full, nodes, g.size());

    const auto src = curl_t_curl(b);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) rhs[k] = -src.values()[nodes[k]];

    // cof∇²v0 positive definite ⇒ the operator is negative definite; flip to SPD.
    const double sign = c(0, 0).mean() > 0.0 ? -1.0 : 1.0;
    a *= sign;
    rhs *= sign;

    MysteryResult out{ScalarField(g), VectorField2(g), 0.0, 0, false};
    const double an = a.norm();
    out.symmetric_operator = ColSparse(a - ColSparse(a.transpose())).norm() <= 1e-12 * an;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    if (rhs.norm() > 0.0) {
        if (out.symmetric_operator) {
            Eigen::ConjugateGradient<ColSparse, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(tol);
            cg.setMaxIterations(max_iter);
            cg.compute(a);
            x = cg.solve(rhs);
            out.iterations = static_cast<int>(cg.iterations());
            if (cg.info() != Eigen::Success) throw SolverError("solve_mystery: CG did not converge", cg.error());
        } else {
            Eigen::BiCGSTAB<ColSparse> bicg;
            bicg.setTolerance(tol);
            bicg.setMaxIterations(max_iter);
            bicg.compute(a);
            x = bicg.solve(rhs);
            out.iterations = static_cast<int>(bicg.iterations());
            if (bicg.info() != Eigen::Success)
                throw SolverError("solve_mystery: BiCGSTAB did not converge", bicg.error());
        }
        out.linear_residual = (a * x - rhs).norm() / rhs.norm();
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) out.v.values()[nodes[k]] = x[k];

    // Strain left for w, and the gradient of its rotation: ∇w = e + ωJ, J = [[0,−1],[1,0]].
    const auto dv = gradient(out.v);
    const auto dv0 = gradient(v0);
    const auto e = sym(b) - sym(outer(dv, dv0));
    const Eigen::VectorXd om1 = d1(g, e(0, 1)) - d2(g, e(0, 0));
    const Eigen::VectorXd om2 = d1(g, e(1, 1)) - d2(g, e(0, 1));

    // Trapezoid line integrals from the corner: along x1 on the first row, then up each column.
    auto integrate_path = [&](const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(g.size());
        for (int i = 1; i < g.nx(); ++i)
            u[g.index(i, 0)] = u[g.index(i - 1, 0)] + 0.5 * g.dx() * (f1[g.index(i - 1, 0)] + f1[g.index(i, 0)]);
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 1; j < g.ny(); ++j)
                u[g.index(i, j)] =
                    u[g.index(i, j - 1)] + 0.5 * g.dy() * (f2[g.index(i, j - 1)] + f2[g.index(i, j)]);
        return u;
    };
    const Eigen::VectorXd omega = integrate_path(om1, om2);
    out.w(0) = integrate_path(e(0, 0), e(0, 1) - omega);
    out.w(1) = integrate_path(e(0, 1) + omega, e(1, 1));
    return out;
}

} // namespace vkshell
