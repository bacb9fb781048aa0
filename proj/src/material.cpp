#include "vkshell/material.hpp"

#include "vkshell/errors.hpp"

#include <cmath>

namespace vkshell {

Material::Material(double mu, double lambda) : mu_(mu), lambda_(lambda) {
    if (!std::isfinite(mu) || !std::isfinite(lambda)) throw InputError("material: non-finite Lamé constants");
    if (!(mu > 0.0)) throw InputError("material: mu must be positive");
    if (!(lambda >= 0.0)) throw InputError("material: lambda must be nonnegative");
}

double q3(const Eigen::Matrix3d& f, const Material& m) {
    const Eigen::Matrix3d s = 0.5 * (f + f.transpose());
    const double tr = f.trace();
    return 2.0 * m.mu() * s.squaredNorm() + m.lambda() * tr * tr;
}

Eigen::Vector3d q2_minimizer(const Eigen::Matrix2d& f, const Material& m) {
    return {0.0, 0.0, -m.lambda() * f.trace() / (2.0 * (2.0 * m.mu() + m.lambda()))};
}

Q2Result q2(const Eigen::Matrix2d& f, const Material& m) {
    const double off = 0.5 * (f(0, 1) + f(1, 0));
    return {q2_value(f(0, 0), f(1, 1), off, m), q2_minimizer(f, m)};
}

Eigen::Vector3d warping_l(const Eigen::Matrix3d& f) {
    return {f(0, 2) + f(2, 0), f(1, 2) + f(2, 1), f(2, 2)};
}

} // namespace vkshell
