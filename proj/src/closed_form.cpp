#include "vkshell/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vkshell {

namespace {

double falling_power(int p, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= static_cast<double>(p - i);
    return r;
}

double wave_derivative(Wave w, double k, double arg, int order) {
    switch (w) {
    case Wave::One:
        return order == 0 ? 1.0 : 0.0;
    case Wave::Sin:
        return std::pow(k, order) * std::sin(arg + order * std::numbers::pi / 2);
    case Wave::Cos:
        return std::pow(k, order) * std::cos(arg + order * std::numbers::pi / 2);
    case Wave::Exp:
        return std::pow(k, order) * std::exp(arg);
    }
    return 0.0;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

double Factor1D::derivative(double x, int order) const {
    const double arg = k * x + phase;
    if (wave == Wave::One) {
        if (order > power) return 0.0;
        return falling_power(power, order) * std::pow(x, power - order);
    }
    // Leibniz rule on x^p * t(kx + phase).
    double sum = 0.0;
    for (int j = 0; j <= std::min(order, power); ++j) {
        const double poly = falling_power(power, j) * std::pow(x, power - j);
        sum += binomial(order, j) * poly * wave_derivative(wave, k, arg, order - j);
    }
    return sum;
}

ClosedForm ClosedForm::constant(double c) { return monomial(c, 0, 0); }

ClosedForm ClosedForm::monomial(double coef, int p, int q) {
    Term t;
    t.coef = coef;
    t.f1.power = p;
    t.f2.power = q;
    return ClosedForm({t});
}

ClosedForm ClosedForm::wave(double coef, Wave t1, double k1, double ph1, Wave t2, double k2, double ph2) {
    Term t;
    t.coef = coef;
    t.f1 = {0, t1, k1, ph1};
    t.f2 = {0, t2, k2, ph2};
    return ClosedForm({t});
}

double ClosedForm::derivative(double x1, double x2, int d1, int d2) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.derivative(x1, x2, d1, d2);
    return s;
}

bool ClosedForm::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef == 0.0; });
}

int ClosedForm::max_poly_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.poly_degree());
    return d;
}

bool ClosedForm::all_finite() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
        return std::isfinite(t.coef) && std::isfinite(t.f1.k) && std::isfinite(t.f2.k) &&
               std::isfinite(t.f1.phase) && std::isfinite(t.f2.phase) && t.f1.power >= 0 && t.f2.power >= 0;
    });
}

ClosedForm& ClosedForm::operator+=(const ClosedForm& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

ClosedForm& ClosedForm::operator*=(double s) {
    for (auto& t : terms_) t.coef *= s;
    return *this;
}

} // namespace vkshell
