#include "agcal/normal_form.hpp"

#include <algorithm>
#include <cmath>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

using Kind = RateExpr::Kind;

constexpr std::size_t kMaxTerms = 4096;
constexpr int kMaxDepth = 64;
// Relative threshold below which a merged dominant constant counts as a
// cancellation we cannot resolve symbolically.
constexpr double kCancelTol = 1e-9;

double checkedExp(double x) {
    if (x > 709.0) throw OverflowSignal("overflow in exp");
    return std::exp(x);
}

double evalBase(int rank, double eps) {
    double v = 1.0 / eps;
    if (rank >= 1) {
        for (int i = 0; i < rank; ++i) v = checkedExp(v);
        return v;
    }
    for (int i = 0; i < -rank; ++i) {
        if (v <= 0.0) throw NumericError("iterated log undefined at this eps");
        v = std::log(v);
    }
    return v;
}

double evalHyperAtom(double eps) {
    const double t = 1.0 / eps;
    const auto iters = static_cast<long long>(std::floor(t));
    double v = t;
    for (long long i = 0; i < iters; ++i) v = checkedExp(v);
    return v;
}

int cmpRational(const Rational& a, const Rational& b) {
    if (a == b) return 0;
    return a < b ? -1 : 1;
}

} // namespace

// ---------------------------------------------------------------- Monomial

int Monomial::growthCompare(const Monomial& other) const {
    auto ia = powers.begin();
    auto ib = other.powers.begin();
    while (ia != powers.end() || ib != other.powers.end()) {
        if (ib == other.powers.end() || (ia != powers.end() && ia->first > ib->first)) {
            if (!ia->second.isZero()) return ia->second.isPositive() ? 1 : -1;
            ++ia;
            continue;
        }
        if (ia == powers.end() || ib->first > ia->first) {
            if (!ib->second.isZero()) return ib->second.isPositive() ? -1 : 1;
            ++ib;
            continue;
        }
        const Rational d = ia->second - ib->second;
        if (!d.isZero()) return d.isPositive() ? 1 : -1;
        ++ia;
        ++ib;
    }
    return 0;
}

Monomial Monomial::times(const Monomial& other) const {
    Monomial r = *this;
    for (const auto& [rank, e] : other.powers) {
        auto it = r.powers.find(rank);
        if (it == r.powers.end()) {
            r.powers.emplace(rank, e);
        } else {
            it->second += e;
            if (it->second.isZero()) r.powers.erase(it);
        }
    }
    return r;
}

Monomial Monomial::power(const Rational& e) const {
    Monomial r;
    if (e.isZero()) return r;
    for (const auto& [rank, x] : powers) r.powers.emplace(rank, x * e);
    return r;
}

double Monomial::evalAt(double eps) const {
    double v = 1.0;
    for (const auto& [rank, e] : powers) {
        const double b = evalBase(rank, eps);
        const double f = std::pow(b, e.toDouble());
        if (std::isinf(f) || std::isnan(f)) throw OverflowSignal("overflow in monomial");
        v *= f;
        if (std::isinf(v)) throw OverflowSignal("overflow in monomial");
    }
    return v;
}

int Monomial::structuralCompare(const Monomial& a, const Monomial& b) {
    auto ia = a.powers.begin();
    auto ib = b.powers.begin();
    while (ia != a.powers.end() && ib != b.powers.end()) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        if (const int c = cmpRational(ia->second, ib->second)) return c;
        ++ia;
        ++ib;
    }
    if (ia != a.powers.end()) return 1;
    if (ib != b.powers.end()) return -1;
    return 0;
}

// ---------------------------------------------------------------- ExpPoly

void ExpPoly::add(const Monomial& m, const Rational& c) {
    if (c.isZero()) return;
    auto it = coef.find(m);
    if (it == coef.end()) {
        coef.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.isZero()) coef.erase(it);
    }
}

ExpPoly ExpPoly::plus(const ExpPoly& other) const {
    ExpPoly r = *this;
    for (const auto& [m, c] : other.coef) r.add(m, c);
    return r;
}

ExpPoly ExpPoly::minus(const ExpPoly& other) const {
    ExpPoly r = *this;
    for (const auto& [m, c] : other.coef) r.add(m, -c);
    return r;
}

ExpPoly ExpPoly::scaled(const Rational& k) const {
    ExpPoly r;
    if (k.isZero()) return r;
    for (const auto& [m, c] : coef) r.coef.emplace(m, c * k);
    return r;
}

ExpPoly::Limit ExpPoly::limit() const {
    // Entries are growth-descending, so the first one decides unless it is
    // bounded; then only the constant monomial contributes.
    for (const auto& [m, c] : coef) {
        switch (m.trend()) {
            case Monomial::Trend::Grows:
                return {c.isPositive() ? LimitKind::PlusInf : LimitKind::MinusInf, Rational(0)};
            case Monomial::Trend::Constant:
                return {LimitKind::Finite, c};
            case Monomial::Trend::Decays:
                return {LimitKind::Finite, Rational(0)};
        }
    }
    return {LimitKind::Finite, Rational(0)};
}

double ExpPoly::evalAt(double eps) const {
    double s = 0.0;
    for (const auto& [m, c] : coef) s += c.toDouble() * m.evalAt(eps);
    if (std::isnan(s) || std::isinf(s)) throw OverflowSignal("overflow in exponent sum");
    return s;
}

int ExpPoly::structuralCompare(const ExpPoly& a, const ExpPoly& b) {
    auto ia = a.coef.begin();
    auto ib = b.coef.begin();
    while (ia != a.coef.end() && ib != b.coef.end()) {
        if (const int c = Monomial::structuralCompare(ia->first, ib->first)) return c;
        if (const int c = cmpRational(ia->second, ib->second)) return c;
        ++ia;
        ++ib;
    }
    if (ia != a.coef.end()) return 1;
    if (ib != b.coef.end()) return -1;
    return 0;
}

// ------------------------------------------------------------------- Coef

Coef Coef::times(const Coef& o) const {
    if (exact && o.exact) return ofRational(rat * o.rat);
    return ofDouble(value() * o.value());
}

Coef Coef::plus(const Coef& o) const {
    if (exact && o.exact) return ofRational(rat + o.rat);
    return ofDouble(value() + o.value());
}

Coef Coef::powered(const Rational& e) const {
    if (exact) {
        if (e.isInteger()) return ofRational(rat.powInt(e.num()));
        if (rat == Rational(1)) return ofRational(Rational(1));
        if (rat.isNegative())
            throw FragmentError("fractional power of a negative constant");
        return ofDouble(std::pow(rat.toDouble(), e.toDouble()));
    }
    if (approx < 0 && !e.isInteger())
        throw FragmentError("fractional power of a negative constant");
    return ofDouble(std::pow(approx, e.toDouble()));
}

// ------------------------------------------------------------------- Term

int Term::growthCompare(const Term& o) const {
    // Any positive hyper power dominates every exp(W).
    if (const int c = cmpRational(hyperExp, o.hyperExp)) return c;
    const ExpPoly delta = w.minus(o.w);
    const auto lim = delta.limit();
    switch (lim.kind) {
        case ExpPoly::LimitKind::PlusInf: return 1;
        case ExpPoly::LimitKind::MinusInf: return -1;
        case ExpPoly::LimitKind::Finite: return 0;
    }
    return 0;
}

double Term::evalAt(double eps) const {
    double v = coef.value();
    if (!hyperExp.isZero()) {
        const double h = evalHyperAtom(eps);
        const double f = std::pow(h, hyperExp.toDouble());
        if (std::isinf(f) || std::isnan(f)) throw OverflowSignal("overflow in hyper");
        v *= f;
    }
    v *= checkedExp(w.evalAt(eps));
    if (std::isinf(v) || std::isnan(v)) throw OverflowSignal("overflow in term");
    return v;
}

// ------------------------------------------------------------- NormalForm

const Term& NormalForm::dominant() const {
    if (terms.empty()) throw ArgumentError("dominant term of the zero net");
    return terms.front();
}

int NormalForm::eventualSign() const {
    if (terms.empty()) return 0;
    if (ambiguous) throw FragmentError("sign lost to cancellation between nearby classes");
    return dominantApprox > 0 ? 1 : -1;
}

NormalForm::Limit NormalForm::limit() const {
    if (terms.empty()) return {Limit::Kind::Finite, 0.0, true, Rational(0)};
    if (ambiguous) throw FragmentError("limit lost to cancellation between nearby classes");

    const Term& top = terms.front();
    const bool topGrows =
        top.hyperExp.isPositive() ||
        (top.hyperExp.isZero() && top.w.limit().kind == ExpPoly::LimitKind::PlusInf);
    if (topGrows)
        return {dominantApprox > 0 ? Limit::Kind::PlusInf : Limit::Kind::MinusInf, 0.0, false,
                Rational(0)};

    // Everything is bounded; limits add termwise.
    double v = 0.0;
    bool exact = true;
    Rational rv(0);
    for (const Term& t : terms) {
        if (t.hyperExp.isNegative()) continue; // tends to 0
        const auto lim = t.w.limit();
        if (lim.kind == ExpPoly::LimitKind::MinusInf) continue; // tends to 0
        // Bounded class: contribution coef * e^{constant part of W}.
        const Rational c0 = lim.finiteValue;
        if (c0.isZero() && t.coef.exact) {
            rv += t.coef.rat;
            v += t.coef.rat.toDouble();
        } else {
            exact = false;
            v += t.coef.value() * std::exp(c0.toDouble());
        }
    }
    if (exact) return {Limit::Kind::Finite, rv.toDouble(), true, rv};
    return {Limit::Kind::Finite, v, false, Rational(0)};
}

double NormalForm::evalAt(double eps) const {
    double s = 0.0;
    for (const Term& t : terms) s += t.evalAt(eps);
    if (std::isinf(s) || std::isnan(s)) throw OverflowSignal("overflow in normal form value");
    return s;
}

// ------------------------------------------------------------- normalize

namespace {

struct TermStructuralLess {
    bool operator()(const Term& a, const Term& b) const {
        if (const int c = cmpRational(a.hyperExp, b.hyperExp)) return c < 0;
        return ExpPoly::structuralCompare(a.w, b.w) < 0;
    }
};

struct TermGrowthDesc {
    bool operator()(const Term& a, const Term& b) const {
        const int g = a.growthCompare(b);
        if (g != 0) return g > 0;
        if (const int c = cmpRational(a.hyperExp, b.hyperExp)) return c > 0;
        return ExpPoly::structuralCompare(a.w, b.w) > 0;
    }
};

NormalForm combine(std::vector<Term> ts, bool ambiguousIn) {
    if (ts.size() > kMaxTerms) throw FragmentError("expression expands past the term budget");

    // Merge identical classes exactly.
    std::sort(ts.begin(), ts.end(), TermStructuralLess{});
    std::vector<Term> merged;
    for (auto& t : ts) {
        if (t.coef.sign() == 0) continue;
        if (!merged.empty() && merged.back().sameClass(t)) {
            merged.back().coef = merged.back().coef.plus(t.coef);
            if (merged.back().coef.sign() == 0) merged.pop_back();
        } else {
            merged.push_back(std::move(t));
        }
    }

    std::sort(merged.begin(), merged.end(), TermGrowthDesc{});

    NormalForm nf;
    nf.terms = std::move(merged);
    nf.ambiguous = ambiguousIn;
    if (nf.terms.empty()) return nf;

    // Classes whose ratio to the dominant one has a finite nonzero limit all
    // contribute to the leading constant; merge them numerically.
    const Term& top = nf.terms.front();
    double totalAbs = 0.0;
    double total = 0.0;
    bool exact = true;
    for (const Term& t : nf.terms) {
        if (top.growthCompare(t) != 0) break;
        const ExpPoly delta = t.w.minus(top.w);
        const Rational shift = delta.limit().finiteValue;
        const double contrib = t.coef.value() * std::exp(shift.toDouble());
        total += contrib;
        totalAbs += std::fabs(contrib);
        exact = exact && t.coef.exact && shift.isZero() && (&t == &top);
    }
    nf.dominantApprox = total;
    nf.dominantExact = exact;
    if (std::fabs(total) <= kCancelTol * totalAbs) nf.ambiguous = true;
    return nf;
}

NormalForm zeroForm() { return NormalForm{}; }

NormalForm unitForm() {
    NormalForm nf;
    nf.terms.push_back(Term{Coef::ofRational(Rational(1)), Rational(0), ExpPoly{}});
    nf.dominantApprox = 1.0;
    nf.dominantExact = true;
    return nf;
}

NormalForm singleTerm(Term t) {
    NormalForm nf;
    nf.dominantApprox = t.coef.value();
    nf.dominantExact = t.coef.exact;
    nf.terms.push_back(std::move(t));
    return nf;
}

NormalForm negated(NormalForm nf) {
    for (auto& t : nf.terms) t.coef = t.coef.negated();
    nf.dominantApprox = -nf.dominantApprox;
    return nf;
}

NormalForm product(const NormalForm& a, const NormalForm& b) {
    if (a.isZero() || b.isZero()) return zeroForm();
    if (a.terms.size() * b.terms.size() > kMaxTerms)
        throw FragmentError("product expands past the term budget");
    std::vector<Term> out;
    out.reserve(a.terms.size() * b.terms.size());
    for (const Term& x : a.terms)
        for (const Term& y : b.terms)
            out.push_back(Term{x.coef.times(y.coef), x.hyperExp + y.hyperExp, x.w.plus(y.w)});
    return combine(std::move(out), a.ambiguous || b.ambiguous);
}

// log of base rank r is the base one rank down; exp folds one rank up.
ExpPoly logOfMonomial(const Monomial& m) {
    ExpPoly w;
    for (const auto& [rank, e] : m.powers) {
        Monomial unit;
        unit.powers.emplace(rank - 1, Rational(1));
        w.add(unit, e);
    }
    return w;
}

NormalForm logOfNF(const NormalForm& x) {
    if (x.isZero()) throw FragmentError("log of the zero net");
    if (x.ambiguous) throw FragmentError("log of a sign-ambiguous sum");
    if (x.terms.size() > 1) throw FragmentError("log of a multi-term sum is outside the fragment");
    const Term& t = x.terms.front();
    if (!t.hyperExp.isZero()) throw FragmentError("log of a hyper power is outside the fragment");
    if (t.coef.sign() <= 0) throw FragmentError("log of an eventually non-positive net");

    std::vector<Term> out;
    for (const auto& [m, c] : t.w.coef) {
        if (m.isConstant()) {
            out.push_back(Term{Coef::ofRational(c), Rational(0), ExpPoly{}});
        } else {
            out.push_back(Term{Coef::ofRational(c), Rational(0), logOfMonomial(m)});
        }
    }
    if (!(t.coef.exact && t.coef.rat == Rational(1))) {
        const double lc = std::log(t.coef.value());
        if (lc != 0.0)
            out.push_back(Term{Coef::ofDouble(lc), Rational(0), ExpPoly{}});
    }
    if (out.empty()) return zeroForm();
    return combine(std::move(out), false);
}

NormalForm expOfNF(const NormalForm& x) {
    if (x.isZero()) return unitForm();
    if (x.ambiguous) throw FragmentError("exp of a sign-ambiguous sum");

    ExpPoly w;
    Coef constant = Coef::ofRational(Rational(1));
    for (const Term& t : x.terms) {
        if (!t.hyperExp.isZero()) throw FragmentError("exp of a hyper power is outside the fragment");

        const bool foldable = t.coef.exact && !t.w.isZero() &&
                              std::all_of(t.w.coef.begin(), t.w.coef.end(),
                                          [](const auto& e) { return e.first.isUnitLinear(); });
        if (foldable) {
            // value of t is coef * prod base_r^{w_r}; push it one rank up.
            Monomial value;
            for (const auto& [m, c] : t.w.coef)
                value.powers.emplace(m.powers.begin()->first + 1, c);
            w.add(value, t.coef.rat);
            continue;
        }

        // Not foldable: only bounded terms can be absorbed into the constant.
        if (t.w.isZero()) {
            // Pure constant c: multiplier e^c.
            constant = constant.times(Coef::ofDouble(std::exp(t.coef.value())));
            continue;
        }
        const auto lim = t.w.limit();
        const int g = t.hyperExp.isZero() ? 0 : t.hyperExp.sign();
        if (g < 0 || lim.kind == ExpPoly::LimitKind::MinusInf) {
            // Term tends to 0; multiplier tends to 1. Class is right, the
            // constant is no longer exact.
            constant = constant.times(Coef::ofDouble(1.0));
            continue;
        }
        if (lim.kind == ExpPoly::LimitKind::Finite) {
            const double tv = t.coef.value() * std::exp(lim.finiteValue.toDouble());
            constant = constant.times(Coef::ofDouble(std::exp(tv)));
            continue;
        }
        throw FragmentError("exp of this growth class is outside the fragment");
    }
    return singleTerm(Term{constant, Rational(0), w});
}

NormalForm powOfNF(const NormalForm& b, const Rational& e, int depth);

NormalForm norm(const RateExpr& e, int depth) {
    if (depth > kMaxDepth) throw FragmentError("expression nests too deeply");
    switch (e.kind()) {
        case Kind::Eps: {
            // eps = exp(-log(1/eps))
            ExpPoly w;
            Monomial l1;
            l1.powers.emplace(-1, Rational(1));
            w.add(l1, Rational(-1));
            return singleTerm(Term{Coef::ofRational(Rational(1)), Rational(0), w});
        }
        case Kind::Const: {
            const Rational& r = e.node().rat;
            if (r.isZero()) return zeroForm();
            return singleTerm(Term{Coef::ofRational(r), Rational(0), ExpPoly{}});
        }
        case Kind::NumConst: {
            const double v = e.node().num;
            if (v == 0.0) return zeroForm();
            return singleTerm(Term{Coef::ofDouble(v), Rational(0), ExpPoly{}});
        }
        case Kind::Add: {
            std::vector<Term> all;
            bool amb = false;
            for (const auto& k : e.kids()) {
                NormalForm part = norm(k, depth + 1);
                amb = amb || part.ambiguous;
                all.insert(all.end(), part.terms.begin(), part.terms.end());
            }
            return combine(std::move(all), amb);
        }
        case Kind::Mul: {
            NormalForm acc = unitForm();
            for (const auto& k : e.kids()) acc = product(acc, norm(k, depth + 1));
            return acc;
        }
        case Kind::Neg:
            return negated(norm(e.kids()[0], depth + 1));
        case Kind::Abs: {
            NormalForm inner = norm(e.kids()[0], depth + 1);
            if (inner.isZero()) return inner;
            return inner.eventualSign() < 0 ? negated(std::move(inner)) : inner;
        }
        case Kind::Pow:
            return powOfNF(norm(e.kids()[0], depth + 1), e.node().rat, depth);
        case Kind::Log:
            return logOfNF(norm(e.kids()[0], depth + 1));
        case Kind::Exp:
            return expOfNF(norm(e.kids()[0], depth + 1));
        case Kind::ExpIter: {
            NormalForm acc = norm(e.kids()[0], depth + 1);
            for (int i = 0; i < e.node().level; ++i) acc = expOfNF(acc);
            return acc;
        }
        case Kind::Hyper: {
            const Rational& a = e.node().rat;
            if (a.isZero()) return unitForm();
            return singleTerm(Term{Coef::ofRational(Rational(1)), a, ExpPoly{}});
        }
        case Kind::Comp: {
            const NormalForm scale = norm(e.kids()[1], depth + 1);
            const auto lim = scale.limit();
            if (lim.kind != NormalForm::Limit::Kind::Finite || lim.value != 0.0 ||
                scale.isZero() || scale.eventualSign() <= 0)
                throw ArgumentError("composition scale must tend to 0 from above");
            return norm(e.kids()[0].substituteEps(e.kids()[1]), depth + 1);
        }
    }
    throw ArgumentError("corrupt expression node");
}

NormalForm powOfNF(const NormalForm& b, const Rational& e, int /*depth*/) {
    if (b.isZero()) {
        if (e.isPositive()) return zeroForm();
        throw FragmentError("zero net raised to a non-positive power");
    }
    if (e.isZero()) return unitForm();
    if (b.terms.size() == 1) {
        const Term& t = b.terms.front();
        return singleTerm(Term{t.coef.powered(e), t.hyperExp * e, t.w.scaled(e)});
    }
    if (e.isInteger() && e.isPositive() && e.num() <= 16) {
        NormalForm acc = unitForm();
        for (std::int64_t i = 0; i < e.num(); ++i) acc = product(acc, b);
        return acc;
    }
    throw FragmentError("non-natural power of a multi-term sum is outside the fragment");
}

} // namespace

NormalForm normalize(const RateExpr& e) {
    if (!e.valid()) throw ArgumentError("empty expression");
    return norm(e, 0);
}

const char* orderRelName(OrderRel r) {
    switch (r) {
        case OrderRel::XbigOofY: return "XbigOofY";
        case OrderRel::YbigOofX: return "YbigOofX";
        case OrderRel::Both: return "Both";
        case OrderRel::Neither: return "Neither";
    }
    return "?";
}

OrderRel compare_O(const NormalForm& x, const NormalForm& y) {
    if (x.isZero()) return y.isZero() ? OrderRel::Both : OrderRel::XbigOofY;
    if (y.isZero()) return OrderRel::YbigOofX;
    if (x.ambiguous || y.ambiguous)
        throw FragmentError("comparison blocked by cancellation between nearby classes");
    switch (x.dominant().growthCompare(y.dominant())) {
        case 1: return OrderRel::YbigOofX;
        case -1: return OrderRel::XbigOofY;
        default: return OrderRel::Both;
    }
}

OrderRel compare_O(const RateExpr& x, const RateExpr& y) {
    return compare_O(normalize(x), normalize(y));
}

RateExpr basisExpr(int rank) {
    if (rank == 0) return rx::epsInv();
    if (rank >= 1) return rx::expIter(rank, rx::epsInv());
    RateExpr e = rx::epsInv();
    for (int i = 0; i < -rank; ++i) e = rx::log(e);
    return e;
}

RateExpr monomialExpr(const Monomial& m) {
    if (m.isConstant()) return rx::lit(1);
    std::vector<RateExpr> factors;
    for (const auto& [rank, e] : m.powers) factors.push_back(rx::pow(basisExpr(rank), e));
    return rx::mul(std::move(factors));
}

RateExpr expPolyExpr(const ExpPoly& w) {
    std::vector<RateExpr> parts;
    for (const auto& [m, c] : w.coef) {
        if (m.isConstant()) parts.push_back(rx::lit(c));
        else parts.push_back(rx::mul(rx::lit(c), monomialExpr(m)));
    }
    if (parts.empty()) return rx::lit(0);
    if (parts.size() == 1) return parts.front();
    RateExpr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = rx::add(acc, parts[i]);
    return acc;
}

RateExpr termClassExpr(const Term& t) {
    std::vector<RateExpr> factors;
    if (t.coef.exact) {
        if (t.coef.rat != Rational(1)) factors.push_back(rx::lit(t.coef.rat));
    } else {
        factors.push_back(rx::num(t.coef.approx));
    }
    if (!t.hyperExp.isZero()) factors.push_back(rx::hyper(t.hyperExp));
    for (const auto& [m, c] : t.w.coef) {
        if (m.isUnitLinear()) {
            factors.push_back(rx::pow(basisExpr(m.powers.begin()->first + 1), c));
        } else if (m.isConstant()) {
            factors.push_back(rx::exp(rx::lit(c)));
        } else {
            factors.push_back(rx::exp(rx::mul(rx::lit(c), monomialExpr(m))));
        }
    }
    if (factors.empty()) return rx::lit(1);
    return rx::mul(std::move(factors));
}

NormalFormView makeView(const NormalForm& nf) {
    NormalFormView v;
    if (nf.isZero()) {
        v.zero = true;
        v.text = "0";
        return v;
    }
    const Term& t = nf.dominant();
    v.ambiguous = nf.ambiguous;
    v.sumRemainder = nf.terms.size() > 1;
    v.hyperExp = t.hyperExp;
    v.constant = nf.dominantApprox;
    v.constantExact = nf.dominantExact && t.coef.exact;
    if (v.constantExact) v.constantRat = t.coef.rat;
    for (const auto& [m, c] : t.w.coef) {
        if (m.isUnitLinear()) {
            v.towerExponents[m.powers.begin()->first + 1] = c;
        } else if (m.isConstant()) {
            v.constant *= std::exp(c.toDouble());
            v.constantExact = false;
        } else {
            v.expFactors.emplace_back(c, m);
        }
    }
    v.text = termClassExpr(t).str();
    return v;
}

} // namespace agcal
