#include "vkshell/plate_energy.hpp"

#include "vkshell/operators.hpp"

#include <cmath>

namespace vkshell {

const char* to_string(Functional f) {
    switch (f) {
    case Functional::I40: return "I40";
    case Functional::I41: return "I41";
    case Functional::I4INF: return "I4INF";
    }
    return "?";
}

PlateVariant variant_for(Functional f) { return f == Functional::I4INF ? PlateVariant::Shallow : PlateVariant::Plate; }

int PlateState::dof() const { return (variant == PlateVariant::Shallow ? 4 : 3) * grid().size(); }

Eigen::VectorXd PlateState::pack() const {
    const int n = grid().size();
    Eigen::VectorXd x(dof());
    x.segment(0, n) = v.values();
    x.segment(n, n) = w(0);
    x.segment(2 * n, n) = w(1);
    if (variant == PlateVariant::Shallow) x.segment(3 * n, n) = vtilde.values();
    return x;
}

void PlateState::unpack(const Eigen::VectorXd& x) {
    if (x.size() != dof()) throw ShapeError("PlateState::unpack: wrong vector length");
    const int n = grid().size();
    v.values() = x.segment(0, n);
    w(0) = x.segment(n, n);
    w(1) = x.segment(2 * n, n);
    if (variant == PlateVariant::Shallow) vtilde.values() = x.segment(3 * n, n);
}

struct PlateFunctional::Strains {
    Eigen::VectorXd dv1, dv2;
    Eigen::VectorXd s11, s22, s12;
    Eigen::VectorXd m11, m22, m12;
    Eigen::VectorXd r;
};

PlateFunctional::PlateFunctional(Functional kind, const GrowthFields& g, const Material& m,
                                 std::optional<ScalarField> v0, double penalty)
    : kind_(kind), grid_(g.grid()), mat_(m), penalty_(0.0) {
    set_penalty(penalty);
    const auto e = sym(minor2(g.eps_g));
    const auto k = sym(minor2(g.kappa_g));
    e11_ = e(0, 0);
    e22_ = e(1, 1);
    e12_ = e(0, 1);
    k11_ = k(0, 0);
    k22_ = k(1, 1);
    k12_ = k(0, 1);
    if (kind == Functional::I40) return;

    if (!v0) throw InputError(std::string(to_string(kind)) + " needs a reference shape v0");
    require_same_grid(grid_, v0->grid(), "PlateFunctional");
    require_finite(*v0, "PlateFunctional v0");
    const auto dv0 = gradient(*v0);
    const auto hv0 = hessian(*v0);
    if (kind == Functional::I41) {
        // Effective targets of the blooming model: ε̂ + ½∇v0⊗∇v0 and κ̂ − ∇²v0.
        e11_ += 0.5 * dv0(0).cwiseProduct(dv0(0));
        e22_ += 0.5 * dv0(1).cwiseProduct(dv0(1));
        e12_ += 0.5 * dv0(0).cwiseProduct(dv0(1));
        k11_ -= hv0(0, 0);
        k22_ -= hv0(1, 1);
        k12_ -= hv0(0, 1);
    } else {
        g1_ = dv0(0);
        g2_ = dv0(1);
        c11_ = hv0(1, 1);
        c22_ = hv0(0, 0);
        c12_ = -hv0(0, 1);
    }
}

void PlateFunctional::set_penalty(double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("constraint penalty must be finite and nonnegative");
    penalty_ = p;
}

void PlateFunctional::check(const PlateState& s) const {
    require_same_grid(grid_, s.grid(), "plate energy");
    if (s.variant != variant_for(kind_))
        throw InputError(std::string("plate energy: state variant does not match functional ") + to_string(kind_));
}

PlateFunctional::Strains PlateFunctional::strains(const PlateState& s) const {
    const auto& op = grid_.ops();
    Strains st;
    st.dv1 = op.d1 * s.v.values();
    st.dv2 = op.d2 * s.v.values();
    st.s11 = op.d1 * s.w(0) + 0.5 * st.dv1.cwiseProduct(st.dv1) - e11_;
    st.s22 = op.d2 * s.w(1) + 0.5 * st.dv2.cwiseProduct(st.dv2) - e22_;
    st.s12 = 0.5 * (op.d2 * s.w(0) + op.d1 * s.w(1)) + 0.5 * st.dv1.cwiseProduct(st.dv2) - e12_;
    if (kind_ == Functional::I4INF) {
        const Eigen::VectorXd t1 = op.d1 * s.vtilde.values();
        const Eigen::VectorXd t2 = op.d2 * s.vtilde.values();
        st.s11 += t1.cwiseProduct(g1_);
        st.s22 += t2.cwiseProduct(g2_);
        st.s12 += 0.5 * (t1.cwiseProduct(g2_) + t2.cwiseProduct(g1_));
    }
    const Eigen::VectorXd h11 = op.d11 * s.v.values();
    const Eigen::VectorXd h22 = op.d22 * s.v.values();
    const Eigen::VectorXd h12 = op.d12 * s.v.values();
    st.m11 = h11 + k11_;
    st.m22 = h22 + k22_;
    st.m12 = h12 + k12_;
    if (kind_ == Functional::I4INF)
        st.r = c11_.cwiseProduct(h11) + c22_.cwiseProduct(h22) + 2.0 * c12_.cwiseProduct(h12);
    return st;
}

namespace {

/// Σ_n wt_n Q2(a_n)
double weighted_q2(const Eigen::VectorXd& wt, const Eigen::VectorXd& a11, const Eigen::VectorXd& a22,
                   const Eigen::VectorXd& a12, const Material& m) {
    const Eigen::ArrayXd tr = a11.array() + a22.array();
    const Eigen::ArrayXd q = 2.0 * m.mu() * (a11.array().square() + a22.array().square() + 2.0 * a12.array().square()) +
                             m.lambda2() * tr.square();
    return (wt.array() * q).sum();
}

} // namespace

EnergyTerms PlateFunctional::evaluate(const PlateState& s) const {
    check(s);
    const auto st = strains(s);
    const auto& wt = grid_.weights();
    EnergyTerms out;
    out.stretching = 0.5 * weighted_q2(wt, st.s11, st.s22, st.s12, mat_);
    out.bending = weighted_q2(wt, st.m11, st.m22, st.m12, mat_) / 24.0;
    if (kind_ == Functional::I4INF) {
        const double rr = wt.dot(st.r.cwiseAbs2());
        out.constraint_residual = std::sqrt(rr);
        out.penalty = penalty_ * rr;
    }
    if (!std::isfinite(out.total())) throw SolverError("plate energy is not finite", out.total());
    return out;
}

double PlateFunctional::value_and_gradient(const PlateState& s, PlateState& grad) const {
    check(s);
    require_same_grid(grid_, grad.grid(), "plate energy gradient");
    if (grad.variant != s.variant) throw InputError("plate energy gradient: variant mismatch");
    const auto st = strains(s);
    const auto& wt = grid_.weights();
    const auto& op = grid_.ops();
    const double mu2 = 2.0 * mat_.mu(), lp = mat_.lambda2();

    // Stretching: ∂(½Q2)/∂S = σ(S) = 2μS + λ' tr S I (off-diagonal counted twice).
    const Eigen::VectorXd trs = st.s11 + st.s22;
    const Eigen::VectorXd a11 = wt.cwiseProduct(mu2 * st.s11 + lp * trs);
    const Eigen::VectorXd a22 = wt.cwiseProduct(mu2 * st.s22 + lp * trs);
    const Eigen::VectorXd a12 = wt.cwiseProduct(mu2 * st.s12);

    grad.w(0) = op.d1.transpose() * a11 + op.d2.transpose() * a12;
    grad.w(1) = op.d2.transpose() * a22 + op.d1.transpose() * a12;
    Eigen::VectorXd gv = op.d1.transpose() * (a11.cwiseProduct(st.dv1) + a12.cwiseProduct(st.dv2)) +
                         op.d2.transpose() * (a22.cwiseProduct(st.dv2) + a12.cwiseProduct(st.dv1));

    // Bending: τ = σ(M)/12.
    const Eigen::VectorXd trm = st.m11 + st.m22;
    const Eigen::VectorXd b11 = wt.cwiseProduct(mu2 * st.m11 + lp * trm) / 12.0;
    const Eigen::VectorXd b22 = wt.cwiseProduct(mu2 * st.m22 + lp * trm) / 12.0;
    const Eigen::VectorXd b12 = wt.cwiseProduct(mu2 * st.m12) / 12.0;
    gv += op.d11.transpose() * b11 + op.d22.transpose() * b22 + 2.0 * (op.d12.transpose() * b12);

    double pen = 0.0;
    if (kind_ == Functional::I4INF) {
        grad.vtilde.values() = op.d1.transpose() * (a11.cwiseProduct(g1_) + a12.cwiseProduct(g2_)) +
                               op.d2.transpose() * (a22.cwiseProduct(g2_) + a12.cwiseProduct(g1_));
        if (penalty_ > 0.0) {
            const Eigen::VectorXd pr = 2.0 * penalty_ * wt.cwiseProduct(st.r);
            gv += op.d11.transpose() * pr.cwiseProduct(c11_) + op.d22.transpose() * pr.cwiseProduct(c22_) +
                  2.0 * (op.d12.transpose() * pr.cwiseProduct(c12_));
        }
        pen = penalty_ * wt.dot(st.r.cwiseAbs2());
    }
    grad.v.values() = std::move(gv);

    const double e = 0.5 * weighted_q2(wt, st.s11, st.s22, st.s12, mat_) +
                     weighted_q2(wt, st.m11, st.m22, st.m12, mat_) / 24.0 + pen;
    if (!std::isfinite(e)) throw SolverError("plate energy is not finite", e);
    return e;
}

double PlateFunctional::value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& gx) const {
    PlateState s(grid_, variant_for(kind_));
    s.unpack(x);
    PlateState g(grid_, s.variant);
    const double e = value_and_gradient(s, g);
    gx = g.pack();
    return e;
}

EnergyTerms quadrature_energy(const MatrixField2& stretch, const MatrixField2& bend, const Material& m) {
    require_same_grid(stretch.grid(), bend.grid(), "quadrature_energy");
    const auto& wt = stretch.grid().weights();
    const auto s = sym(stretch);
    const auto b = sym(bend);
    EnergyTerms out;
    out.stretching = 0.5 * weighted_q2(wt, s(0, 0), s(1, 1), s(0, 1), m);
    out.bending = weighted_q2(wt, b(0, 0), b(1, 1), b(0, 1), m) / 24.0;
    return out;
}

double energy_i40(const PlateState& s, const GrowthFields& g, const Material& m) {
    return PlateFunctional(Functional::I40, g, m).evaluate(s).total();
}

double energy_i41(const PlateState& s, const GrowthFields& g, const Material& m, const ScalarField& v0) {
    return PlateFunctional(Functional::I41, g, m, v0).evaluate(s).total();
}

ShallowEnergy energy_i4inf(const PlateState& s, const GrowthFields& g, const Material& m, const ScalarField& v0,
                           double constraint_penalty) {
    const auto t = PlateFunctional(Functional::I4INF, g, m, v0, constraint_penalty).evaluate(s);
    return {t.total(), t.constraint_residual};
}

PlateState grad_energy(Functional f, const PlateState& s, const GrowthFields& g, const Material& m,
                       const ScalarField& v0, double constraint_penalty) {
    const PlateFunctional fn =
        f == Functional::I40 ? PlateFunctional(f, g, m) : PlateFunctional(f, g, m, v0, constraint_penalty);
    PlateState grad(s.grid(), s.variant);
    fn.value_and_gradient(s, grad);
    return grad;
}

} // namespace vkshell
