#pragma once

#include <Eigen/Core>

namespace vkshell {

/// Isotropic Lamé pair with the derived plate constants.
class Material {
public:
    Material(double mu, double lambda);

    double mu() const { return mu_; }
    double lambda() const { return lambda_; }
    /// Plane-stress trace modulus 2μλ/(2μ+λ).
    double lambda2() const { return 2.0 * mu_ * lambda_ / (2.0 * mu_ + lambda_); }
    double nu() const { return lambda_ / (2.0 * (lambda_ + mu_)); }
    double young() const { return mu_ * (3.0 * lambda_ + 2.0 * mu_) / (lambda_ + mu_); }
    double bending_stiffness() const { return young() / (12.0 * (1.0 - nu() * nu())); }

private:
    double mu_, lambda_;
};

/// 2μ|sym F|² + λ(tr F)²
double q3(const Eigen::Matrix3d& f, const Material& m);

struct Q2Result {
    double value;
    Eigen::Vector3d c;
};
/// Closed-form relaxation min_c Q3(F* + c⊗e3 + e3⊗c) and its minimizer.
Q2Result q2(const Eigen::Matrix2d& f, const Material& m);
/// Q2 value only.
inline double q2_value(double a11, double a22, double a12, const Material& m) {
    const double tr = a11 + a22;
    return 2.0 * m.mu() * (a11 * a11 + a22 * a22 + 2.0 * a12 * a12) + m.lambda2() * tr * tr;
}
/// Minimizer c(F) as a linear map of F (does not depend on the skew part).
Eigen::Vector3d q2_minimizer(const Eigen::Matrix2d& f, const Material& m);

/// (F13+F31, F23+F32, F33): the unique vector with sym(F − (F_2x2)*) = sym(l ⊗ e3).
Eigen::Vector3d warping_l(const Eigen::Matrix3d& f);

} // namespace vkshell
