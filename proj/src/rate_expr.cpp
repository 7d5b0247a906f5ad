#include "agcal/rate_expr.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

using Kind = RateExpr::Kind;

bool finiteOrThrow(double v, const char* what) {
    if (std::isinf(v) || std::isnan(v)) throw OverflowSignal(std::string("overflow in ") + what);
    return true;
}

double checkedExp(double x) {
    if (x > 709.0) throw OverflowSignal("overflow in exp");
    return std::exp(x);
}

// Printer precedence levels: sum < product < power < atom.
enum Prec { PrecSum = 0, PrecProd = 1, PrecPow = 2, PrecAtom = 3 };

int precOf(const RateExpr& e) {
    switch (e.kind()) {
        case Kind::Add: return PrecSum;
        case Kind::Neg: return PrecSum;
        case Kind::Mul: return PrecProd;
        case Kind::Pow: return PrecPow;
        case Kind::Const:
            return e.node().rat.isNegative() ? PrecSum : PrecAtom;
        case Kind::NumConst:
            return e.node().num < 0 ? PrecSum : PrecAtom;
        default: return PrecAtom;
    }
}

void print(const RateExpr& e, int parentPrec, std::string& out) {
    const bool needParen = precOf(e) < parentPrec;
    if (needParen) out += "(";
    switch (e.kind()) {
        case Kind::Eps:
            out += "eps";
            break;
        case Kind::Const:
            out += e.node().rat.str();
            break;
        case Kind::NumConst: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e.node().num);
            out += buf;
            break;
        }
        case Kind::Add: {
            bool first = true;
            for (const auto& t : e.kids()) {
                if (first) {
                    print(t, PrecSum, out);
                    first = false;
                } else if (t.kind() == Kind::Neg) {
                    out += " - ";
                    print(t.kids()[0], PrecProd, out);
                } else if (t.kind() == Kind::Const && t.node().rat.isNegative()) {
                    out += " - ";
                    out += (-t.node().rat).str();
                } else if (t.kind() == Kind::NumConst && t.node().num < 0) {
                    char buf[40];
                    std::snprintf(buf, sizeof buf, "%.17g", -t.node().num);
                    out += " - ";
                    out += buf;
                } else {
                    out += " + ";
                    print(t, PrecProd, out);
                }
            }
            break;
        }
        case Kind::Mul: {
            bool first = true;
            for (const auto& f : e.kids()) {
                if (!first) out += " * ";
                print(f, PrecProd, out);
                first = false;
            }
            break;
        }
        case Kind::Neg:
            out += "-";
            print(e.kids()[0], PrecProd, out);
            break;
        case Kind::Abs:
            out += "abs(";
            print(e.kids()[0], PrecSum, out);
            out += ")";
            break;
        case Kind::Pow: {
            // A fractional constant base must be parenthesized: 4/3^1/2
            // would read back as 4 / 3^(1/2) since ^ binds tighter than /.
            const RateExpr& b = e.kids()[0];
            const bool wrap = precOf(b) < PrecAtom ||
                              (b.kind() == Kind::Const && !b.node().rat.isInteger());
            if (wrap) {
                out += "(";
                print(b, PrecSum, out);
                out += ")";
            } else {
                print(b, PrecAtom, out);
            }
            out += "^";
            out += e.node().rat.str();
            break;
        }
        case Kind::Log:
            out += "log(";
            print(e.kids()[0], PrecSum, out);
            out += ")";
            break;
        case Kind::Exp:
            out += "exp(";
            print(e.kids()[0], PrecSum, out);
            out += ")";
            break;
        case Kind::ExpIter:
            out += "exp@" + std::to_string(e.node().level) + "(";
            print(e.kids()[0], PrecSum, out);
            out += ")";
            break;
        case Kind::Hyper:
            out += "hyper(" + e.node().rat.str() + ")";
            break;
        case Kind::Comp:
            out += "comp(";
            print(e.kids()[0], PrecSum, out);
            out += ", ";
            print(e.kids()[1], PrecSum, out);
            out += ")";
            break;
    }
    if (needParen) out += ")";
}

double evalNode(const RateExpr& e, double eps);

double evalHyper(const Rational& a, double eps) {
    // (exp@[1/eps](1/eps))^a, with the iteration count truncated toward zero.
    const double t = 1.0 / eps;
    const auto iters = static_cast<long long>(std::floor(t));
    double v = t;
    for (long long i = 0; i < iters; ++i) v = checkedExp(v);
    const double r = std::pow(v, a.toDouble());
    finiteOrThrow(r, "hyper");
    return r;
}

double evalNode(const RateExpr& e, double eps) {
    switch (e.kind()) {
        case Kind::Eps: return eps;
        case Kind::Const: return e.node().rat.toDouble();
        case Kind::NumConst: return e.node().num;
        case Kind::Add: {
            double s = 0.0;
            for (const auto& t : e.kids()) s += evalNode(t, eps);
            finiteOrThrow(s, "sum");
            return s;
        }
        case Kind::Mul: {
            double p = 1.0;
            for (const auto& f : e.kids()) p *= evalNode(f, eps);
            finiteOrThrow(p, "product");
            return p;
        }
        case Kind::Neg: return -evalNode(e.kids()[0], eps);
        case Kind::Abs: return std::fabs(evalNode(e.kids()[0], eps));
        case Kind::Pow: {
            const double b = evalNode(e.kids()[0], eps);
            const double r = std::pow(b, e.node().rat.toDouble());
            finiteOrThrow(r, "power");
            return r;
        }
        case Kind::Log: {
            const double v = evalNode(e.kids()[0], eps);
            if (v <= 0.0) throw NumericError("log of a non-positive value");
            return std::log(v);
        }
        case Kind::Exp: return checkedExp(evalNode(e.kids()[0], eps));
        case Kind::ExpIter: {
            double v = evalNode(e.kids()[0], eps);
            for (int i = 0; i < e.node().level; ++i) v = checkedExp(v);
            return v;
        }
        case Kind::Hyper: return evalHyper(e.node().rat, eps);
        case Kind::Comp: {
            const double s = evalNode(e.kids()[1], eps);
            if (s <= 0.0 || s > 1.0)
                throw ArgumentError("composed scale left (0, 1]");
            return evalNode(e.kids()[0], s);
        }
    }
    throw ArgumentError("corrupt expression node");
}

} // namespace

std::string RateExpr::str() const {
    std::string out;
    print(*this, PrecSum, out);
    return out;
}

double RateExpr::evalAt(double eps) const {
    if (!(eps > 0.0) || eps > 1.0) throw ArgumentError("evalAt requires 0 < eps <= 1");
    return evalNode(*this, eps);
}

RateExpr RateExpr::substituteEps(const RateExpr& replacement) const {
    if (kind() == Kind::Eps) return replacement;
    Node n = node();
    for (auto& k : n.kids) k = k.substituteEps(replacement);
    return make(std::move(n));
}

bool RateExpr::sameTree(const RateExpr& other) const {
    if (node_ == other.node_) return true;
    const Node& a = node();
    const Node& b = other.node();
    if (a.kind != b.kind || a.rat != b.rat || a.num != b.num || a.level != b.level ||
        a.kids.size() != b.kids.size())
        return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!a.kids[i].sameTree(b.kids[i])) return false;
    return true;
}

namespace rx {

RateExpr eps() { return RateExpr::make({Kind::Eps, Rational(), 0.0, 0, {}}); }

RateExpr lit(const Rational& value) { return RateExpr::make({Kind::Const, value, 0.0, 0, {}}); }
RateExpr lit(std::int64_t value) { return lit(Rational(value)); }

RateExpr num(double value) { return RateExpr::make({Kind::NumConst, Rational(), value, 0, {}}); }

RateExpr numOrRational(double v) {
    // Best rational approximation by continued fractions; accepted only when
    // it reproduces v to 1e-12 relative, so exact decimals round-trip.
    if (std::isfinite(v) && std::abs(v) <= 1e15) {
        double x = v;
        std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        for (int i = 0; i < 40; ++i) {
            double fl = std::floor(x);
            if (std::abs(fl) > 9e17) break;
            auto a = static_cast<std::int64_t>(fl);
            std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
            if (q2 != 0 &&
                std::abs(static_cast<double>(p2) / static_cast<double>(q2) - v) <=
                    1e-12 * std::max(1.0, std::abs(v)))
                return lit(Rational(p2, q2));
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            double frac = x - fl;
            if (frac < 1e-15) break;
            x = 1.0 / frac;
        }
    }
    return num(v);
}

RateExpr add(std::vector<RateExpr> terms) {
    if (terms.empty()) throw ArgumentError("empty sum");
    if (terms.size() == 1) return terms[0];
    std::vector<RateExpr> flat;
    for (auto& t : terms) {
        if (t.kind() == Kind::Add)
            flat.insert(flat.end(), t.kids().begin(), t.kids().end());
        else
            flat.push_back(t);
    }
    return RateExpr::make({Kind::Add, Rational(), 0.0, 0, std::move(flat)});
}
RateExpr add(const RateExpr& a, const RateExpr& b) { return add(std::vector<RateExpr>{a, b}); }
RateExpr sub(const RateExpr& a, const RateExpr& b) { return add(a, neg(b)); }

RateExpr mul(std::vector<RateExpr> factors) {
    if (factors.empty()) throw ArgumentError("empty product");
    std::vector<RateExpr> flat;
    for (auto& f : factors) {
        if (f.kind() == Kind::Mul)
            flat.insert(flat.end(), f.kids().begin(), f.kids().end());
        else
            flat.push_back(f);
    }
    // Fold rational factors into one leading constant so products have a
    // single canonical spelling; keep them in place if the fold overflows.
    Rational cr(1);
    bool sawConst = false, constOverflow = false;
    std::vector<RateExpr> rest;
    for (auto& f : flat) {
        if (!constOverflow && f.kind() == Kind::Const) {
            try {
                cr *= f.node().rat;
                sawConst = true;
                continue;
            } catch (const FragmentError&) {
                constOverflow = true;
            }
        }
        rest.push_back(f);
    }
    if (sawConst && cr.isZero()) return lit(0);
    if (sawConst && cr != Rational(1)) rest.insert(rest.begin(), lit(cr));
    if (rest.empty()) return lit(1);
    if (rest.size() == 1) return rest[0];
    return RateExpr::make({Kind::Mul, Rational(), 0.0, 0, std::move(rest)});
}
RateExpr mul(const RateExpr& a, const RateExpr& b) { return mul(std::vector<RateExpr>{a, b}); }

RateExpr div(const RateExpr& a, const RateExpr& b) { return mul(a, pow(b, Rational(-1))); }

RateExpr neg(const RateExpr& a) {
    if (a.kind() == Kind::Neg) return a.kids()[0];
    if (a.kind() == Kind::Const) return lit(-a.node().rat);
    if (a.kind() == Kind::NumConst) return num(-a.node().num);
    return RateExpr::make({Kind::Neg, Rational(), 0.0, 0, {a}});
}

RateExpr absv(const RateExpr& a) { return RateExpr::make({Kind::Abs, Rational(), 0.0, 0, {a}}); }

RateExpr pow(const RateExpr& base, const Rational& exponent) {
    if (exponent == Rational(1)) return base;
    // Collapse (b^p)^q so the canonical printer never stacks exponents.
    if (base.kind() == Kind::Pow)
        return pow(base.kids()[0], base.node().rat * exponent);
    // Integer powers of constants fold to the exact value; keep the node if
    // the fold would overflow or hit 0^-k.
    if (base.kind() == Kind::Const && exponent.isInteger() &&
        !(base.node().rat.isZero() && exponent.isNegative())) {
        try {
            return lit(base.node().rat.powInt(exponent.num()));
        } catch (const FragmentError&) {
        }
    }
    if (base.kind() == Kind::NumConst) {
        const double v = std::pow(base.node().num, exponent.toDouble());
        if (std::isfinite(v)) return num(v);
    }
    return RateExpr::make({Kind::Pow, exponent, 0.0, 0, {base}});
}

RateExpr log(const RateExpr& a) { return RateExpr::make({Kind::Log, Rational(), 0.0, 0, {a}}); }
RateExpr exp(const RateExpr& a) { return RateExpr::make({Kind::Exp, Rational(), 0.0, 0, {a}}); }

RateExpr expIter(int level, const RateExpr& a) {
    if (level < 1) throw ArgumentError("exp@ level must be >= 1");
    if (level == 1) return exp(a);
    return RateExpr::make({Kind::ExpIter, Rational(), 0.0, level, {a}});
}

RateExpr hyper(const Rational& a) { return RateExpr::make({Kind::Hyper, a, 0.0, 0, {}}); }

RateExpr comp(const RateExpr& body, const RateExpr& scale) {
    return RateExpr::make({Kind::Comp, Rational(), 0.0, 0, {body, scale}});
}

RateExpr epsInv() { return pow(eps(), Rational(-1)); }
RateExpr epsPow(const Rational& e) { return pow(eps(), e); }
RateExpr logInvEps() { return log(epsInv()); }

} // namespace rx

} // namespace agcal
