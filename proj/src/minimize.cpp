#include "vkshell/solver.hpp"

#include "vkshell/operators.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <deque>
#include <numbers>

namespace vkshell {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

/// Places `block` (n×n) at column offset `col` of an n×dof matrix.
ColSparse place(const SparseOp& block, int col, int dof) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(block.nonZeros());
    for (int r = 0; r < block.outerSize(); ++r)
        for (SparseOp::InnerIterator it(block, r); it; ++it) trip.emplace_back(r, col + it.col(), it.value());
    ColSparse m(block.rows(), dof);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

/// Hessian of s/2 Σ wt Q2(a, b, c) for linear maps a = A x, b = B x, c = C x (c the off-diagonal).
ColSparse quad_hessian(const ColSparse& a, const ColSparse& b, const ColSparse& c, const Eigen::VectorXd& wt,
                       const Material& m, double s) {
    const double d = 2.0 * m.mu() + m.lambda2();
    const auto w = wt.asDiagonal();
    ColSparse wa = w * a, wb = w * b, wc = w * c;
    ColSparse h = d * (ColSparse(a.transpose()) * wa + ColSparse(b.transpose()) * wb) +
                  m.lambda2() * (ColSparse(a.transpose()) * wb + ColSparse(b.transpose()) * wa) +
                  4.0 * m.mu() * (ColSparse(c.transpose()) * wc);
    return s * h;
}

/// SPD approximation of the energy Hessian: the exact quadratic bending, membrane (w, ṽ) and
/// penalty parts, plus a mass shift well below the lowest physical mode.
class Preconditioner {
public:
    Preconditioner(const PlateFunctional& fn, const ScalarField& v0) {
        const auto& g = fn.grid();
        const auto& op = g.ops();
        const int n = g.size();
        const bool shallow = fn.kind() == Functional::I4INF;
        const int dof = (shallow ? 4 : 3) * n;
        const auto& wt = g.weights();
        const auto& m = fn.material();

        const ColSparse a_v = place(op.d11, 0, dof), b_v = place(op.d22, 0, dof), c_v = place(op.d12, 0, dof);
        ColSparse h = quad_hessian(a_v, b_v, c_v, wt, m, 1.0 / 12.0);

        ColSparse a_w = place(op.d1, n, dof), b_w = place(op.d2, 2 * n, dof);
        ColSparse c_w = 0.5 * (place(op.d2, n, dof) + place(op.d1, 2 * n, dof));
        if (shallow) {
            const auto dv0 = gradient(v0);
            const auto& g1 = dv0(0);
            const auto& g2 = dv0(1);
            a_w += ColSparse(g1.asDiagonal() * place(op.d1, 3 * n, dof));
            b_w += ColSparse(g2.asDiagonal() * place(op.d2, 3 * n, dof));
            c_w += 0.5 * ColSparse(g2.asDiagonal() * place(op.d1, 3 * n, dof) +
                                   g1.asDiagonal() * place(op.d2, 3 * n, dof));
            if (fn.penalty() > 0.0) {
                const auto c = cof2(hessian(v0));
                ColSparse r = ColSparse(c(0, 0).asDiagonal() * a_v) + ColSparse(c(1, 1).asDiagonal() * b_v) +
                              ColSparse((2.0 * c(0, 1)).asDiagonal() * c_v);
                h += 2.0 * fn.penalty() * ColSparse(ColSparse(r.transpose()) * (wt.asDiagonal() * r));
            }
        }
        h += quad_hessian(a_w, b_w, c_w, wt, m, 1.0);

        const double lmax = std::max(g.domain().width(), g.domain().height());
        const double k = 2.0 * std::numbers::pi / lmax;
        const double cell = g.dx() * g.dy();
        const double dv = 0.1 * (2.0 * m.mu() + m.lambda2()) / 12.0 * std::pow(k, 4) * cell;
        const double dw = 0.1 * m.mu() * k * k * cell;
        for (int i = 0; i < dof; ++i) h.coeffRef(i, i) += i < n ? dv : dw;
        h.makeCompressed();
        llt_.compute(h);
        if (llt_.info() != Eigen::Success) throw SolverError("preconditioner factorization failed", 0.0);
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& r) const { return llt_.solve(r); }

private:
    Eigen::SimplicialLDLT<ColSparse> llt_;
};

struct StageOutcome {
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    std::string message;
};

StageOutcome lbfgs(const PlateFunctional& fn, const Preconditioner& pre, Eigen::VectorXd& x, double& e,
                   double tol, const MinimizeOptions& o, std::vector<double>& history) {
    StageOutcome out;
    Eigen::VectorXd g;
    e = fn.value_and_gradient(x, g);
    std::deque<Eigen::VectorXd> ss, ys;
    std::deque<double> rho;

    for (int it = 0;; ++it) {
        out.grad_norm = g.norm();
        out.iterations = it;
        if (out.grad_norm <= tol) {
            out.converged = true;
            return out;
        }
        if (it >= o.max_iter) {
            out.message = "iteration limit reached";
            return out;
        }

        // Two-loop recursion with the preconditioner as initial inverse Hessian.
        auto direction = [&]() {
            Eigen::VectorXd q = g;
            std::vector<double> alpha(ss.size());
            for (int k = static_cast<int>(ss.size()) - 1; k >= 0; --k) {
                alpha[k] = rho[k] * ss[k].dot(q);
                q -= alpha[k] * ys[k];
            }
            Eigen::VectorXd r = pre.apply(q);
            for (std::size_t k = 0; k < ss.size(); ++k) {
                const double beta = rho[k] * ys[k].dot(r);
                r += (alpha[k] - beta) * ss[k];
            }
            return Eigen::VectorXd(-r);
        };

        bool accepted = false;
        Eigen::VectorXd xn, gn;
        double en = 0.0;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd d = direction();
            double slope = g.dot(d);
            if (!(slope < 0.0)) {
                ss.clear();
                ys.clear();
                rho.clear();
                d = -pre.apply(g);
                slope = g.dot(d);
                if (!(slope < 0.0)) break;
            }
            double t = 1.0;
            for (int bt = 0; bt < o.max_backtracks; ++bt, t *= o.backtrack) {
                xn = x + t * d;
                try {
                    en = fn.value_and_gradient(xn, gn);
                } catch (const SolverError&) {
                    continue;
                }
                if (en <= e + o.armijo * t * slope) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                ss.clear();
                ys.clear();
                rho.clear();
            }
        }
        if (!accepted) {
            out.message = "line search failed to find a descent step";
            return out;
        }

        Eigen::VectorXd s = xn - x, y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            if (static_cast<int>(ss.size()) == o.memory) {
                ss.pop_front();
                ys.pop_front();
                rho.pop_front();
            }
            ss.push_back(std::move(s));
            ys.push_back(std::move(y));
            rho.push_back(1.0 / sy);
        }
        x = std::move(xn);
        g = std::move(gn);
        e = en;
        history.push_back(e);
    }
}

} // namespace

MinimizeResult minimize(Functional f, const PlateState& init, const GrowthFields& g, const Material& m,
                        const ScalarField& v0, const MinimizeOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    require_same_grid(init.grid(), g.grid(), "minimize");
    if (init.variant != variant_for(f)) throw InputError("minimize: initial state variant does not match functional");
    if (opts.memory < 1 || opts.max_iter < 0) throw InputError("minimize: invalid options");

    const bool shallow = f == Functional::I4INF;
    PlateFunctional fn = f == Functional::I40 ? PlateFunctional(f, g, m)
                                              : PlateFunctional(f, g, m, v0, shallow ? opts.penalty.initial : 0.0);
    Eigen::VectorXd x = init.pack();
    double e = fn.evaluate(init).total();
    if (!std::isfinite(e)) throw SolverError("minimize: initial energy is not finite", e);
    const double tol = opts.tol < 0.0 ? 1e-8 * (1.0 + std::abs(e)) : opts.tol;

    MinimizeResult res{init, {}};
    auto& rep = res.report;
    const int stages = shallow ? std::max(1, opts.penalty.stages) : 1;
    StageOutcome st;
    for (int stage = 0; stage < stages; ++stage) {
        if (shallow && stage > 0) fn.set_penalty(fn.penalty() * opts.penalty.factor);
        const Preconditioner pre(fn, v0);
        MinimizeOptions o = opts;
        o.max_iter = std::max(0, opts.max_iter - rep.iterations);
        st = lbfgs(fn, pre, x, e, tol, o, rep.history);
        rep.iterations += st.iterations;
        if (shallow) {
            PlateState s(g.grid(), init.variant);
            s.unpack(x);
            rep.stage_residuals.push_back(fn.evaluate(s).constraint_residual);
        }
    }

    PlateState s(g.grid(), init.variant);
    s.unpack(x);
    res.state = gauge_fix(s);
    const auto terms = fn.evaluate(res.state);
    rep.final_energy = terms.total();
    rep.constraint_residual = terms.constraint_residual;
    rep.grad_norm = st.grad_norm;
    rep.converged = st.converged;
    rep.message = st.converged ? "converged" : st.message;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace vkshell
