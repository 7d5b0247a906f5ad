#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agcal/net.hpp"

namespace agcal {

// A closed-form smooth function of one real variable with derivatives of
// every order inside the same class:
//
//   Poly   P(x)
//   Trig   P(x) sin x + Q(x) cos x
//   Exp    P(x) e^x
//   Gauss  P(x) e^(-x^2)
//   Bump   N(x) / (1-x^2)^m * e^(-1/(1-x^2)) on (-1,1), 0 outside
//
// with P, Q, N real polynomials. Differentiation stays in the class (the
// trig pair rotates, Gauss pulls down -2x, Bump raises the denominator
// power), which is what keeps sup-norm nets of derivatives exact.
class SmoothProfile {
public:
    enum class Kind { Poly, Trig, Exp, Gauss, Bump };

    static SmoothProfile poly(std::vector<double> coef);  // ascending powers
    static SmoothProfile sine();
    static SmoothProfile cosine();
    static SmoothProfile expFn();
    static SmoothProfile gauss();
    static SmoothProfile gaussTimesPoly(std::vector<double> coef);
    static SmoothProfile bump();

    Kind kind() const { return kind_; }
    const std::vector<double>& mainPoly() const { return p_; }
    const std::vector<double>& cosPoly() const { return q_; }

    SmoothProfile derivative() const;
    double operator()(double x) const;

    // Profile multiplied by a plain polynomial; every kind absorbs that.
    SmoothProfile timesPoly(const std::vector<double>& coef) const;

    // Value composed with a rate expression, when the result stays in the
    // symbolic fragment (Poly, Exp, Gauss); nullopt for Trig and Bump.
    std::optional<RateExpr> exprAt(const RateExpr& x) const;

    // Largest |value| over [lo, hi]: dense scan plus local refinement.
    double maxAbsOn(double lo, double hi) const;

    bool boundedEverywhere() const { return kind_ == Kind::Trig || kind_ == Kind::Gauss || kind_ == Kind::Bump; }
    bool compactSupport() const { return kind_ == Kind::Bump; }
    bool isZero() const;
    // Structural equality (same kind and identical polynomial data).
    bool sameAs(const SmoothProfile& other) const;
    std::string describe() const;

private:
    SmoothProfile(Kind k, std::vector<double> p, std::vector<double> q, int denPow)
        : kind_(k), p_(std::move(p)), q_(std::move(q)), denPow_(denPow) {}

    Kind kind_;
    std::vector<double> p_;  // P (or N for Bump)
    std::vector<double> q_;  // Q, Trig only
    int denPow_ = 0;         // Bump only
};

// An eps-indexed family of smooth functions on the line, in one of three
// forms:
//
//   SeparableSum  sum of coef_i(eps) * profile_i(x)
//   ScaledKernel  x -> scaleOut(eps) * kernel(scaleIn(eps) * (x - shift))
//   BlackBox      arbitrary evaluator with a finite derivative budget
//
// The first two forms are closed under d/dx with exact bookkeeping; the
// black box differentiates by central differences and burns one order of
// its budget per derivative.
class SmoothFamily {
public:
    enum class Form { SeparableSum, ScaledKernel, BlackBox };

    struct Term {
        RateExpr coef;
        SmoothProfile profile;
    };

    static SmoothFamily separable(std::vector<Term> terms);
    static SmoothFamily constantProfile(const SmoothProfile& p);  // coef 1
    static SmoothFamily scaledKernel(SmoothProfile kernel, RateExpr scaleIn, RateExpr scaleOut,
                                     double shift);
    static SmoothFamily blackBox(std::function<double(double, double)> eval, int maxDerivOrder,
                                 std::string label = "blackbox");
    static SmoothFamily zero();

    Form form() const { return form_; }
    const std::vector<Term>& terms() const { return terms_; }          // SeparableSum
    const SmoothProfile& kernel() const { return terms_.front().profile; }  // ScaledKernel
    const RateExpr& scaleIn() const { return scaleIn_; }
    const RateExpr& scaleOut() const { return scaleOut_; }
    double shift() const { return shift_; }

    // Derivatives still available: unbounded for closed forms.
    int derivBudget() const;

    SmoothFamily derivative() const;  // throws CapabilityError on exhausted box
    double eval(double eps, double x) const;

    // The net eps -> sup over [lo, hi] of |d^alpha/dx^alpha u_eps|. Exact
    // symbolic for the closed forms (constant bounds, or endpoint values when
    // an unbounded kernel sweeps the window); sampled/callable otherwise.
    Net supNorm(double lo, double hi, int alpha,
                const IndexSet& index = IndexSet::halfOpenUnit()) const;

    std::string describe() const;

private:
    SmoothFamily() = default;

    Form form_ = Form::SeparableSum;
    std::vector<Term> terms_;  // SeparableSum terms; ScaledKernel stores {1, kernel}
    RateExpr scaleIn_, scaleOut_;
    double shift_ = 0.0;
    std::function<double(double, double)> eval_;
    int derivBudget_ = 0;
    std::string label_;
};

// Pointwise sum and product of families. Separable sums concatenate; constant
// separable factors fold into coefficients exactly; separable products stay
// separable when one profile per pair is a polynomial. Anything else becomes
// a black box with the smaller derivative budget.
SmoothFamily famAdd(const SmoothFamily& a, const SmoothFamily& b);
SmoothFamily famMul(const SmoothFamily& a, const SmoothFamily& b);

// Family scaled by an eps-number, staying in the same form.
SmoothFamily scaleFamily(const SmoothFamily& f, const RateExpr& c);

}  // namespace agcal
