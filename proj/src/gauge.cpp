#include "vkshell/solver.hpp"

#include "vkshell/operators.hpp"

namespace vkshell {

namespace {

double wmean(const Eigen::VectorXd& wt, double total, const Eigen::VectorXd& u) { return wt.dot(u) / total; }

} // namespace

PlateState gauge_fix(const PlateState& s) {
    const auto& g = s.grid();
    const auto& wt = g.weights();
    const double total = wt.sum();
    const auto& op = g.ops();
    PlateState out = s;

    auto& v = out.v.values();
    auto& w1 = out.w(0);
    auto& w2 = out.w(1);
    v.array() -= wmean(wt, total, v);

    if (!g.periodic()) {
        Eigen::VectorXd x1(g.size()), x2(g.size());
        for (int n = 0; n < g.size(); ++n) {
            x1[n] = g.x1_of(n);
            x2[n] = g.x2_of(n);
        }
        const double m1 = wmean(wt, total, x1), m2 = wmean(wt, total, x2);
        x1.array() -= m1;
        x2.array() -= m2;

        // Affine part b of v, removed with the compensating update that keeps
        // sym∇w + ½∇v⊗∇v unchanged: v' = v − b·x, w' = w + v'b + ½(b·x)b.
        const double b1 = wmean(wt, total, op.d1 * v);
        const double b2 = wmean(wt, total, op.d2 * v);
        const Eigen::VectorXd bx = b1 * x1 + b2 * x2;
        v -= bx;
        const Eigen::VectorXd shift = v + 0.5 * bx;
        w1 += b1 * shift;
        w2 += b2 * shift;
        v.array() -= wmean(wt, total, v);

        // Mean infinitesimal rotation: mode (−x2, x1) has ∂1w2 − ∂2w1 = 2.
        const double rot = 0.5 * wmean(wt, total, op.d1 * w2 - op.d2 * w1);
        w1 += rot * x2;
        w2 -= rot * x1;
    }
    w1.array() -= wmean(wt, total, w1);
    w2.array() -= wmean(wt, total, w2);
    if (out.variant == PlateVariant::Shallow) out.vtilde.values().array() -= wmean(wt, total, out.vtilde.values());
    return out;
}

} // namespace vkshell
