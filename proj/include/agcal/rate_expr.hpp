#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agcal/rational.hpp"

namespace agcal {

// Closed-form scale expressions in one symbol `eps`, built from rationals,
// +, -, *, /, rational powers, log, exp, iterated exp, the super-exponential
// atom hyper(a), abs and composition. This is the symbolic half of the
// engine; growth questions are decided on the normal form (normal_form.hpp)
// and everything else falls back to pointwise evaluation.
class RateExpr {
public:
    enum class Kind {
        Eps,      // the index variable
        Const,    // exact rational constant
        NumConst, // double constant, only created programmatically
        Add,      // n-ary sum
        Mul,      // n-ary product
        Neg,
        Abs,
        Pow,      // kid^rat
        Log,
        Exp,
        ExpIter,  // exp@k, k >= 1
        Hyper,    // hyper(a): [1/eps]-fold iterated exp of 1/eps, to the power a
        Comp,     // kid0 with eps := kid1
    };

    struct Node {
        Kind kind;
        Rational rat;               // Const value, Pow exponent, Hyper argument
        double num = 0.0;           // NumConst payload
        int level = 0;              // ExpIter depth
        std::vector<RateExpr> kids;
    };

    RateExpr() = default;
    bool valid() const { return node_ != nullptr; }

    const Node& node() const { return *node_; }
    Kind kind() const { return node_->kind; }
    const std::vector<RateExpr>& kids() const { return node_->kids; }

    // Canonical text; reparsing it yields a structurally identical tree.
    std::string str() const;

    // Pointwise value at 0 < eps <= 1. Throws OverflowSignal when the value
    // escapes double range, ArgumentError on a bad eps.
    double evalAt(double eps) const;

    // Tree with every `eps` leaf replaced by `replacement`.
    RateExpr substituteEps(const RateExpr& replacement) const;

    bool sameTree(const RateExpr& other) const;

    static RateExpr make(Node n) {
        return RateExpr(std::make_shared<const Node>(std::move(n)));
    }

private:
    explicit RateExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Builders. Sums and products flatten nested nodes of the same kind so the
// canonical printer sees one flat list.
namespace rx {

RateExpr eps();
RateExpr lit(const Rational& value);
RateExpr lit(std::int64_t value);
RateExpr num(double value);
// Exact rational literal when v snaps to one (continued fractions, 1e-12
// relative), plain numeric constant otherwise. Exactness matters under exp,
// where folding requires rational coefficients.
RateExpr numOrRational(double v);
RateExpr add(const RateExpr& a, const RateExpr& b);
RateExpr add(std::vector<RateExpr> terms);
RateExpr sub(const RateExpr& a, const RateExpr& b);
RateExpr mul(const RateExpr& a, const RateExpr& b);
RateExpr mul(std::vector<RateExpr> factors);
RateExpr div(const RateExpr& a, const RateExpr& b);
RateExpr neg(const RateExpr& a);
RateExpr absv(const RateExpr& a);
RateExpr pow(const RateExpr& base, const Rational& exponent);
RateExpr log(const RateExpr& a);
RateExpr exp(const RateExpr& a);
RateExpr expIter(int level, const RateExpr& a);
RateExpr hyper(const Rational& a);
RateExpr comp(const RateExpr& body, const RateExpr& scale);

// Common shorthands.
RateExpr epsInv();                       // eps^-1
RateExpr epsPow(const Rational& e);      // eps^e
RateExpr logInvEps();                    // log(eps^-1)

} // namespace rx

} // namespace agcal
