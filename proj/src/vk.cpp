#include "vkshell/solver.hpp"

#include "vkshell/operators.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace vkshell {

const char* to_string(VKModel m) { return m == VKModel::Old ? "old" : "new"; }

namespace {

void project(Eigen::VectorXd& u, const Grid2D& g) { u.array() -= g.weights().dot(u) / g.weights().sum(); }

struct Sources {
    Eigen::VectorXd lambda_g;
    Eigen::VectorXd omega_g;
    Eigen::VectorXd det_v0;
    Eigen::VectorXd bilap_v0;
};

Sources sources(VKModel model, const GrowthFields& g, const Material& m, const ScalarField& v0) {
    Sources s;
    s.lambda_g = lambda_g(g).values();
    s.omega_g = omega_g(g, m.nu()).values();
    const int n = g.grid().size();
    if (model == VKModel::New) {
        s.det_v0 = det2(hessian(v0)).values();
        s.bilap_v0 = bilaplacian(v0).values();
    } else {
        s.det_v0 = Eigen::VectorXd::Zero(n);
        s.bilap_v0 = Eigen::VectorXd::Zero(n);
    }
    return s;
}

/// Right-hand side of Δ²Φ = −Y(det∇²v − det∇²v0 + λ_g).
Eigen::VectorXd phi_rhs(const ScalarField& v, const Sources& src, const Material& m) {
    return -m.young() * (det2(hessian(v)).values() - src.det_v0 + src.lambda_g);
}

/// Right-hand side of Δ²(v − v0) = [v,Φ]/Z − Ω_g.
Eigen::VectorXd v_rhs(const ScalarField& v, const ScalarField& phi, const Sources& src, const Material& m) {
    return airy_bracket(v, phi).values() / m.bending_stiffness() - src.omega_g;
}

double wl2(const Grid2D& g, const Eigen::VectorXd& r) { return std::sqrt(g.weights().dot(r.cwiseAbs2())); }

VKResidual residual(const VKState& s, const Sources& src, const Material& m, const ScalarField& v0, VKModel model) {
    const auto& g = s.v.grid();
    Eigen::VectorXd r1 = bilaplacian(s.phi).values() - phi_rhs(s.v, src, m);
    ScalarField u = s.v;
    if (model == VKModel::New) u.values() -= v0.values();
    Eigen::VectorXd r2 = m.bending_stiffness() * (bilaplacian(u).values() - v_rhs(s.v, s.phi, src, m));
    if (g.periodic()) {
        project(r1, g);
        project(r2, g);
    }
    return {wl2(g, r1), wl2(g, r2)};
}

} // namespace

VKResidual vk_residual(const VKState& s, VKModel model, const GrowthFields& g, const Material& m,
                       const ScalarField& v0) {
    require_same_grid(s.v.grid(), g.grid(), "vk_residual");
    require_same_grid(s.v.grid(), v0.grid(), "vk_residual");
    return residual(s, sources(model, g, m, v0), m, v0, model);
}

VKResult solve_vk(VKModel model, const GrowthFields& g, const Material& m, const ScalarField& v0,
                  const VKOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& grid = g.grid();
    require_same_grid(grid, v0.grid(), "solve_vk");
    require_finite(v0, "solve_vk v0");
    if (!grid.periodic()) throw InputError("solve_vk: the von Kármán systems are solved on the periodic torus only");
    if (!(opts.relaxation > 0.0 && opts.relaxation <= 1.0)) throw InputError("solve_vk: relaxation must lie in (0, 1]");

    const Sources src = sources(model, g, m, v0);
    const double Y = m.young(), Z = m.bending_stiffness();
    const double scale = 1.0 + wl2(grid, src.lambda_g) + wl2(grid, src.omega_g) + wl2(grid, src.det_v0) +
                         wl2(grid, src.bilap_v0);
    auto joint = [&](const VKResidual& r) { return std::max(r.r1 / Y, r.r2 / Z) / scale; };

    VKResult res{VKState(grid), {}};
    auto& st = res.state;
    auto& rep = res.report;
    if (model == VKModel::New) st.v.values() = v0.values();

    // u = v − v0 is the unknown of the v-equation (u = v for the old model).
    Eigen::VectorXd u = Eigen::VectorXd::Zero(grid.size());
    double r = joint(residual(st, src, m, v0, model));
    rep.history.push_back(r);
    int growth_streak = 0;
    const double omega = opts.relaxation;
    for (int sweep = 0; sweep < opts.max_sweeps && !(r <= opts.tol); ++sweep) {
        ScalarField rhs1(grid);
        rhs1.values() = phi_rhs(st.v, src, m);
        st.phi = solve_biharmonic(rhs1).u;

        ScalarField rhs2(grid);
        rhs2.values() = v_rhs(st.v, st.phi, src, m);
        const Eigen::VectorXd u_new = solve_biharmonic(rhs2).u.values();
        u = (1.0 - omega) * u + omega * u_new;
        st.v.values() = model == VKModel::New ? Eigen::VectorXd(v0.values() + u) : u;

        const double rn = joint(residual(st, src, m, v0, model));
        growth_streak = rn > r ? growth_streak + 1 : 0;
        r = rn;
        rep.history.push_back(r);
        rep.iterations = sweep + 1;
        if (!std::isfinite(r) || growth_streak >= opts.divergence_window) {
            std::ostringstream msg;
            msg << "solve_vk diverged after " << rep.iterations
                << " sweeps; try a smaller relaxation or a smaller growth amplitude";
            throw SolverError(msg.str(), r);
        }
    }
    // Φ consistent with the final v.
    ScalarField rhs1(grid);
    rhs1.values() = phi_rhs(st.v, src, m);
    st.phi = solve_biharmonic(rhs1).u;
    const auto fin = residual(st, src, m, v0, model);
    rep.grad_norm = joint(fin);
    rep.constraint_residual = 0.0;
    rep.converged = rep.grad_norm <= opts.tol;
    rep.message = rep.converged ? "converged" : "sweep limit reached";
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace vkshell
