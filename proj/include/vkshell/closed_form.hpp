#pragma once

// Separable closed-form scalar functions with exact partial derivatives of any order.
//
// A ClosedForm is a finite sum of terms
//     coef * x1^p * x2^q * t1(k1*x1 + phase1) * t2(k2*x2 + phase2),
// where each t is one of {1, sin, cos, exp}.  Polynomials, trigonometric presets and
// their products are all representable, which is what the growth tensors, reference
// shapes and recovery-sequence states need.

#include <string>
#include <vector>

namespace vkshell {

enum class Wave { One, Sin, Cos, Exp };

/// One-variable factor x^p * t(k x + phase).
struct Factor1D {
    int power = 0;
    Wave wave = Wave::One;
    double k = 0.0;
    double phase = 0.0;

    double derivative(double x, int order) const;
};

struct Term {
    double coef = 0.0;
    Factor1D f1;
    Factor1D f2;

    double derivative(double x1, double x2, int d1, int d2) const {
        if (coef == 0.0) return 0.0;
        return coef * f1.derivative(x1, d1) * f2.derivative(x2, d2);
    }
    int poly_degree() const { return f1.power + f2.power; }
};

class ClosedForm {
public:
    ClosedForm() = default;
    explicit ClosedForm(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static ClosedForm constant(double c);
    /// coef * x1^p * x2^q
    static ClosedForm monomial(double coef, int p, int q);
    /// coef * t1(k1 x1 + ph1) * t2(k2 x2 + ph2)
    static ClosedForm wave(double coef, Wave t1, double k1, double ph1, Wave t2, double k2, double ph2);

    double operator()(double x1, double x2) const { return derivative(x1, x2, 0, 0); }
    /// d^(d1+d2) / dx1^d1 dx2^d2
    double derivative(double x1, double x2, int d1, int d2) const;

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const;
    int max_poly_degree() const;
    bool all_finite() const;

    ClosedForm& operator+=(const ClosedForm& o);
    ClosedForm& operator*=(double s);
    friend ClosedForm operator+(ClosedForm a, const ClosedForm& b) { return a += b; }
    friend ClosedForm operator*(double s, ClosedForm a) { return a *= s; }

private:
    std::vector<Term> terms_;
};

} // namespace vkshell
