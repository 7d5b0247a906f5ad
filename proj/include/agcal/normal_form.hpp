#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agcal/rate_expr.hpp"

namespace agcal {

// Growth normal form for the closed exp-log fragment, as eps -> 0+.
//
// Every base symbol is an integer rank r:
//   r  = 0    1/eps
//   r >= 1    exp@r(1/eps)
//   r <= -1   log iterated |r| times of 1/eps
// All bases tend to +infinity, and rank order is growth order: any positive
// power of a higher-ranked base swamps every combination of lower-ranked ones.
//
// A term stores the magnitude  coef * hyper^h * exp(W)  where W is a finite
// rational-coefficient sum of monomials over the bases. Logarithms fold bases
// down one rank (log of rank r is rank r-1), exponentials fold values up one
// rank, so the fragment closes without full transseries machinery. hyper is
// the opaque super-exponential atom: any positive power of it dominates
// exp(W) for every W, and hyper(a) = O(hyper(b)) iff a <= b.
//
// A normal form is a signed sum of such terms, combined exactly when classes
// coincide and ordered by decreasing growth. Growth questions reduce to the
// sign of the dominant monomial of a difference of W's, which is decidable by
// the rank order above.

// Product of base symbols with rational exponents. Empty product is the
// constant 1.
struct Monomial {
    std::map<int, Rational, std::greater<int>> powers;

    bool isConstant() const { return powers.empty(); }
    // Single base with exponent one; these are the monomials that fold when
    // exponentiated.
    bool isUnitLinear() const {
        return powers.size() == 1 && powers.begin()->second == Rational(1);
    }

    enum class Trend { Grows, Constant, Decays };
    Trend trend() const {
        if (powers.empty()) return Trend::Constant;
        return powers.begin()->second.isPositive() ? Trend::Grows : Trend::Decays;
    }

    // Sign of growth of *this relative to other: +1 if this/other -> inf,
    // -1 if -> 0, 0 exactly when the monomials are equal.
    int growthCompare(const Monomial& other) const;

    Monomial times(const Monomial& other) const;
    Monomial power(const Rational& e) const;

    double evalAt(double eps) const; // throws OverflowSignal / NumericError

    bool operator==(const Monomial& other) const { return powers == other.powers; }
    // Deterministic structural order for containers.
    static int structuralCompare(const Monomial& a, const Monomial& b);
};

struct MonomialGrowthDesc {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return a.growthCompare(b) > 0;
    }
};

// Rational-coefficient sum of monomials; used both as an exponent (W above)
// and as a plain polynomial value.
struct ExpPoly {
    std::map<Monomial, Rational, MonomialGrowthDesc> coef;

    bool isZero() const { return coef.empty(); }
    void add(const Monomial& m, const Rational& c);
    ExpPoly plus(const ExpPoly& other) const;
    ExpPoly minus(const ExpPoly& other) const;
    ExpPoly scaled(const Rational& k) const;

    // Limit behaviour of the sum as eps -> 0+.
    enum class LimitKind { PlusInf, MinusInf, Finite };
    struct Limit {
        LimitKind kind;
        Rational finiteValue; // constant-monomial coefficient when Finite
    };
    Limit limit() const;

    double evalAt(double eps) const;

    bool operator==(const ExpPoly& other) const { return coef == other.coef; }
    static int structuralCompare(const ExpPoly& a, const ExpPoly& b);
};

// Multiplicative constant, exact when it arose from rational arithmetic only.
struct Coef {
    Rational rat{1};      // meaningful when exact
    double approx = 1.0;  // always the signed numeric value
    bool exact = true;

    static Coef ofRational(const Rational& r) { return {r, r.toDouble(), true}; }
    static Coef ofDouble(double v) { return {Rational(0), v, false}; }
    int sign() const { return exact ? rat.sign() : (approx > 0 ? 1 : (approx < 0 ? -1 : 0)); }
    double value() const { return exact ? rat.toDouble() : approx; }
    Coef negated() const { return exact ? ofRational(-rat) : ofDouble(-approx); }
    Coef times(const Coef& o) const;
    Coef plus(const Coef& o) const; // same-class combination
    Coef powered(const Rational& e) const;
};

struct Term {
    Coef coef;            // signed
    Rational hyperExp{0};
    ExpPoly w;

    bool sameClass(const Term& o) const { return hyperExp == o.hyperExp && w == o.w; }
    // Growth of |this| relative to |other|: +1 faster, -1 slower, 0 when the
    // ratio has a finite nonzero limit.
    int growthCompare(const Term& o) const;
    double evalAt(double eps) const;
};

enum class OrderRel { XbigOofY, YbigOofX, Both, Neither };
const char* orderRelName(OrderRel r);

class NormalForm {
public:
    std::vector<Term> terms; // growth-descending; empty means identically zero
    // Set when distinct finite-ratio classes at the top cancel to within
    // rounding, so dominant sign and constant are not trustworthy. Symbolic
    // queries throw FragmentError; callers fall back to numerics.
    bool ambiguous = false;
    // Dominant constant after merging finite-ratio classes at the top.
    double dominantApprox = 0.0;
    bool dominantExact = true;

    bool isZero() const { return terms.empty(); }
    const Term& dominant() const;

    // Eventual sign of the net: -1, 0, +1. Throws FragmentError if ambiguous.
    int eventualSign() const;

    struct Limit {
        enum class Kind { Finite, PlusInf, MinusInf } kind;
        double value = 0.0;     // when Finite
        bool exact = false;     // value is exactly rationalValue
        Rational rationalValue{0};
    };
    Limit limit() const; // throws FragmentError if ambiguous

    double evalAt(double eps) const;
};

// Rewrites an expression tree into its normal form. Throws FragmentError for
// constructs outside the decidable fragment (log of a multi-term sum, exp of
// a non-foldable class, hyper under log/exp, fractional powers of sums, ...).
NormalForm normalize(const RateExpr& e);

OrderRel compare_O(const NormalForm& x, const NormalForm& y);
OrderRel compare_O(const RateExpr& x, const RateExpr& y);

// Reconstructions, used for witness reporting.
RateExpr basisExpr(int rank);
RateExpr monomialExpr(const Monomial& m);
// Sum over all monomials with their coefficients (the "log of the growth
// class" seen as a rate expression). Returns 0 for the empty polynomial.
RateExpr expPolyExpr(const ExpPoly& w);
// Expression with the same growth class as the term (constant included when
// exact).
RateExpr termClassExpr(const Term& t);

// Reporting view of the dominant class: tower exponents keyed by rank, plus
// any non-foldable exponential factors.
struct NormalFormView {
    bool zero = false;
    double constant = 0.0;
    bool constantExact = true;
    Rational constantRat{0};
    Rational hyperExp{0};
    std::map<int, Rational> towerExponents;           // rank -> exponent
    std::vector<std::pair<Rational, Monomial>> expFactors; // coefficient, inner
    bool sumRemainder = false;
    bool ambiguous = false;
    std::string text; // canonical text of the dominant class
};
NormalFormView makeView(const NormalForm& nf);

} // namespace agcal
