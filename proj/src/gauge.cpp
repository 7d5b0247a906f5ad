#include "agcal/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

Net netOf(const RateExpr& e, const IndexSet& index) { return Net::symbolic(e, index); }

// Normal form of a symbolic net, or nullopt when the expression leaves the
// fragment or its dominant class is ambiguous. Callers treat nullopt as "use
// the numeric fallback".
std::optional<NormalForm> tryNF(const RateExpr& e, const IndexSet& index) {
    try {
        auto nf = netOf(e, index).normalForm();
        if (nf && nf->ambiguous) return std::nullopt;
        return nf;
    } catch (const FragmentError&) {
        return std::nullopt;
    }
}

std::optional<NormalForm> tryNF(const Net& n) {
    try {
        auto nf = n.normalForm();
        if (nf && nf->ambiguous) return std::nullopt;
        return nf;
    } catch (const FragmentError&) {
        return std::nullopt;
    }
}

std::string joined(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "; " + b;
}

// |e| at eps, with overflow read as "very large" so magnitude comparisons can
// still order members; NaN for genuinely undefined points.
double magnitudeAt(const RateExpr& e, const IndexSet& index, double eps) {
    try {
        return std::fabs(netOf(e, index).at(eps));
    } catch (const OverflowSignal&) {
        return std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Strict growth order between member expressions, for sorting generator
// lists ascending. Exact when both normal forms exist; otherwise compares
// magnitudes at a small eps.
bool growthLessExpr(const RateExpr& a, const RateExpr& b, const IndexSet& index) {
    auto na = tryNF(a, index), nb = tryNF(b, index);
    if (na && nb && !na->isZero() && !nb->isZero())
        return compare_O(*na, *nb) == OrderRel::XbigOofY;
    for (double eps : {1e-4, 1e-2, 0.3}) {
        const double ma = magnitudeAt(a, index, eps), mb = magnitudeAt(b, index, eps);
        if (std::isnan(ma) || std::isnan(mb)) continue;
        if (ma != mb) return ma < mb;
    }
    return false;
}

bool eventuallyPositiveExpr(const RateExpr& e, const IndexSet& index) {
    if (auto nf = tryNF(e, index)) {
        if (nf->isZero()) return false;
        try {
            return nf->eventualSign() > 0;
        } catch (const FragmentError&) {
        }
    }
    return orderGt(netOf(e, index), Net::zero(index)).holds();
}

// Are the two members comparable in eventual order (either direction, or the
// same class)?
bool comparableExprs(const RateExpr& a, const RateExpr& b, const IndexSet& index) {
    auto na = tryNF(a, index), nb = tryNF(b, index);
    if (na && nb) {
        if (na->isZero() || nb->isZero()) return true;
        return compare_O(*na, *nb) != OrderRel::Neither;
    }
    const Net an = netOf(a, index), bn = netOf(b, index);
    return orderGt(an, bn).holds() || orderGt(bn, an).holds() || bigO(an, bn).holds();
}

// ---------------------------------------------------------------------------
// Structural growth primitives on normal forms
// ---------------------------------------------------------------------------

// Does u / b^a -> infinity for every fixed a > 0? Decidable on dominant
// classes: positive hyper growth beats everything hyper-free, and within the
// exp-log classes the top monomial of u must sit strictly above b's, because
// exponent scaling rescales coefficients but never moves a monomial's growth
// class. blockingExponent is a power of b that already fails when not.
struct PowerEscape {
    bool escapes = false;
    long long blockingExponent = 1;
};

PowerEscape escapesAllPowers(const NormalForm& u, const NormalForm& b) {
    if (u.isZero()) return {false, 1};
    if (b.isZero()) return {true, 0};
    const Term& du = u.dominant();
    const Term& db = b.dominant();
    if (db.hyperExp.isPositive()) {
        if (!du.hyperExp.isPositive()) return {false, 1};
        const long long a = (du.hyperExp / db.hyperExp).floorToInt() + 1;
        return {false, std::max(1LL, a)};
    }
    if (du.hyperExp.isPositive()) return {true, 0};
    if (du.hyperExp.isNegative()) return {false, 1};
    if (du.w.isZero()) return {false, 1};  // u bounded
    const auto mu = du.w.coef.begin();
    if (!(mu->second.isPositive() && mu->first.trend() == Monomial::Trend::Grows))
        return {false, 1};  // u does not grow
    if (db.w.isZero()) return {true, 0};  // u grows, b bounded
    const auto mb = db.w.coef.begin();
    if (!(mb->second.isPositive() && mb->first.trend() == Monomial::Trend::Grows))
        return {true, 0};
    const int rel = mu->first.growthCompare(mb->first);
    if (rel > 0) return {true, 0};
    if (rel < 0) return {false, 1};
    // Same monomial: a pure coefficient race, crossed at a > cu / cb.
    const long long a = (mu->second / mb->second).floorToInt() + 1;
    return {false, std::max(1LL, a)};
}

// ---------------------------------------------------------------------------
// Member selection for moderateness
// ---------------------------------------------------------------------------

struct Pick {
    bool ok = false;
    RateExpr member;             // dominating member when ok
    long long powerExponent = 0; // filled by the power-family search
    std::string reason;          // refusal reason when !ok
    RateExpr probe;              // member to demonstrate the failure against
    bool degenerate = false;     // structure unreadable; use numerics
};

Pick pickMember(const NormalForm& nfx, const Gauge& g);

Pick pickPowers(const NormalForm& nfx, const RateExpr& base, const Gauge& g) {
    Pick p;
    const auto nfb = tryNF(base, g.index());
    if (!nfb || nfb->isZero()) {
        p.degenerate = true;
        return p;
    }
    const Term& dx = nfx.dominant();
    const Term& db = nfb->dominant();
    if (db.hyperExp.isPositive()) {
        long long a = 1;
        if (dx.hyperExp.isPositive()) a = (dx.hyperExp / db.hyperExp).floorToInt() + 1;
        p.ok = true;
        p.powerExponent = a;
        p.member = rx::pow(base, Rational(a));
        return p;
    }
    if (dx.hyperExp.isPositive()) {
        p.reason = "super-exponential growth escapes every power of " + base.str();
        p.probe = rx::pow(base, Rational(8));
        return p;
    }
    if (dx.hyperExp.isNegative()) {
        p.ok = true;
        p.powerExponent = 1;
        p.member = base;
        return p;
    }
    if (db.w.isZero()) {
        p.degenerate = true;  // bounded base: not a usable power family
        return p;
    }
    const auto mb = db.w.coef.begin();
    if (!(mb->second.isPositive() && mb->first.trend() == Monomial::Trend::Grows)) {
        p.degenerate = true;
        return p;
    }
    for (const auto& [m, c] : dx.w.coef) {
        if (c.isPositive() && m.trend() == Monomial::Trend::Grows && m.growthCompare(mb->first) > 0) {
            p.reason = "growth class exp(" + rx::mul(rx::lit(c), monomialExpr(m)).str() +
                       ") outruns every power of " + base.str();
            p.probe = rx::pow(base, Rational(8));
            return p;
        }
    }
    Rational cx(0);
    if (auto it = dx.w.coef.find(mb->first); it != dx.w.coef.end()) cx = it->second;
    long long a = std::max<long long>(1, (cx / mb->second).ceilToInt());
    for (int iter = 0; iter < 40; ++iter, ++a) {
        const ExpPoly diff = dx.w.minus(db.w.scaled(Rational(a)));
        if (diff.isZero()) break;
        const auto top = diff.coef.begin();
        if (!(top->second.isPositive() && top->first.trend() == Monomial::Trend::Grows)) break;
    }
    p.ok = true;
    p.powerExponent = a;
    p.member = rx::pow(base, Rational(a));
    return p;
}

// Lowest tower level whose exponent monomial dominates the whole of w.
int towerLevelAbove(const ExpPoly& w) {
    if (w.isZero()) return 1;
    const auto top = w.coef.begin();
    if (!(top->second.isPositive() && top->first.trend() == Monomial::Trend::Grows)) return 1;
    const int topRank = top->first.powers.begin()->first;
    for (int k = std::max(1, topRank); k <= topRank + 3; ++k) {
        Monomial mk;
        mk.powers[k - 1] = Rational(1);
        ExpPoly wk;
        wk.add(mk, Rational(1));
        const ExpPoly diff = w.minus(wk);
        if (diff.isZero()) continue;
        const auto d = diff.coef.begin();
        if (!(d->second.isPositive() && d->first.trend() == Monomial::Trend::Grows)) return k;
    }
    return std::max(1, topRank) + 3;
}

Pick pickTowers(const NormalForm& nfx, const Gauge& g) {
    Pick p;
    const Term& dx = nfx.dominant();
    if (dx.hyperExp.isPositive()) {
        p.reason = "super-exponential growth escapes every iterated exponential";
        p.probe = g.memberExprAt(4);
        return p;
    }
    const int k = dx.hyperExp.isNegative() ? 1 : towerLevelAbove(dx.w);
    p.ok = true;
    p.member = g.memberExprAt(k);
    return p;
}

Pick pickGenerators(const NormalForm& nfx, const Gauge& g) {
    Pick p;
    bool sawUnreadable = false;
    for (const RateExpr& m : g.members()) {
        const auto nfm = tryNF(m, g.index());
        if (!nfm || nfm->isZero()) {
            sawUnreadable = true;
            continue;
        }
        const OrderRel rel = compare_O(nfx, *nfm);
        if (rel == OrderRel::XbigOofY || rel == OrderRel::Both) {
            p.ok = true;
            p.member = m;
            return p;
        }
    }
    if (sawUnreadable) {
        p.degenerate = true;
        return p;
    }
    p.reason = "no generator dominates x";
    if (!g.members().empty()) p.probe = g.members().back();
    return p;
}

Pick pickExpOf(const NormalForm& nfx, const Gauge& g) {
    Pick p;
    const Gauge& inner = g.inner();
    const Term& dx = nfx.dominant();
    if (dx.hyperExp.isPositive()) {
        p.reason = "super-exponential growth escapes every exponential member";
        p.probe = g.memberExprAt(3);
        return p;
    }
    if (dx.hyperExp.isNegative() || dx.w.isZero()) {
        p.ok = true;
        p.member = g.memberExprAt(1);
        return p;
    }
    const auto top = dx.w.coef.begin();
    if (!(top->second.isPositive() && top->first.trend() == Monomial::Trend::Grows)) {
        p.ok = true;  // x bounded or decaying
        p.member = g.memberExprAt(1);
        return p;
    }
    // Compare the log-growth of x against the inner family.
    const RateExpr xlog = expPolyExpr(dx.w);
    const auto nflog = tryNF(xlog, g.index());
    if (!nflog || nflog->isZero()) {
        p.degenerate = true;
        return p;
    }
    Pick q = pickMember(*nflog, inner);
    if (q.degenerate) {
        p.degenerate = true;
        return p;
    }
    if (!q.ok) {
        p.reason = "the log-growth of x escapes the inner family (" + q.reason + ")";
        p.probe = g.memberExprAt(3);
        return p;
    }
    long long H = 1;
    if (const auto nfm = tryNF(q.member, g.index()); nfm && !nfm->isZero()) {
        const OrderRel rel = compare_O(*nflog, *nfm);
        if (rel == OrderRel::Both) {
            const double c = std::fabs(nflog->dominantApprox / nfm->dominantApprox);
            if (std::isfinite(c)) H = static_cast<long long>(std::floor(c)) + 1;
        } else if (rel != OrderRel::XbigOofY) {
            H = 2;  // defensive; the pick said the member dominates
        }
    }
    p.ok = true;
    p.member = rx::exp(rx::mul(rx::lit(H), q.member));
    return p;
}

Pick pickMember(const NormalForm& nfx, const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers: return pickPowers(nfx, g.base(), g);
        case Gauge::Family::Generators: return pickGenerators(nfx, g);
        case Gauge::Family::ExpOf: return pickExpOf(nfx, g);
        case Gauge::Family::Towers: return pickTowers(nfx, g);
    }
    Pick p;
    p.degenerate = true;
    return p;
}

// Confirm a structural pick with the bound checker, so every Holds carries
// an honest (H, eps0) pair.
Verdict sealHolds(const Net& x, const RateExpr& memberExpr, const IndexSet& index,
                  const std::string& extra) {
    Verdict v = bigO(x, netOf(memberExpr, index));
    if (!v.holds())
        return Verdict::inconclusive("structural member selection (" + memberExpr.str() +
                                     ") disagreed with the bound check; " + v.note);
    v.note = joined("witness member " + memberExpr.str(), joined(extra, v.note));
    return v;
}

// A structural refusal applies to every member; the probe attaches concrete
// counterexample indices against one of them.
Verdict sealFails(const Net& x, const RateExpr& probeExpr, const IndexSet& index,
                  const std::string& reason) {
    Verdict v = bigO(x, netOf(probeExpr, index));
    if (v.fails())
        return Verdict::failsExact(v.counterexample,
                                   joined(reason, "already fails against member " + probeExpr.str()));
    if (v.holds())
        return Verdict::inconclusive("structural refusal (" + reason +
                                     ") conflicts with a holding probe bound against " +
                                     probeExpr.str());
    return Verdict::failsExact({}, reason);
}

Verdict moderateNumeric(const Net& x, const Gauge& g) {
    const int maxProbe = g.family() == Gauge::Family::Generators
                             ? static_cast<int>(g.members().size())
                             : 12;
    Verdict last = Verdict::inconclusive();
    for (int j = 1; j <= maxProbe; ++j) {
        Verdict v = bigO(x, g.memberAt(j));
        if (v.holds()) {
            v.confidence = std::min(v.confidence, 0.85);
            v.note = joined("dominated by member " + g.memberExprAt(j).str(), v.note);
            return v;
        }
        last = v;
    }
    if (g.family() == Gauge::Family::Powers) {
        // Fit the relative order of x against the base and probe just above it.
        const auto pts = gridPoints(x.index(), GridSpec{});
        const GridTrace tx = traceNet(x, pts);
        const GridTrace tb = traceNet(netOf(g.base(), g.index()), pts);
        const std::size_t n = std::min(tx.value.size(), tb.value.size());
        if (n >= 12) {
            std::vector<double> bx(n), xv(n);
            for (std::size_t i = 0; i < n; ++i) {
                bx[i] = std::fabs(tb.value[i]);
                xv[i] = tx.value[i];
            }
            const double slope = logLogSlope(bx, xv);
            if (std::isfinite(slope) && std::fabs(slope) < 60.0) {
                const long long a = std::max<long long>(1, static_cast<long long>(std::ceil(slope)) + 1);
                Verdict v = bigO(x, netOf(rx::pow(g.base(), Rational(a)), g.index()));
                if (v.holds()) {
                    v.confidence = std::min(v.confidence, 0.8);
                    v.note = joined("fitted relative order ~" + std::to_string(slope) +
                                        "; dominated by exponent " + std::to_string(a),
                                    v.note);
                    return v;
                }
            }
        }
    }
    if (last.fails()) {
        last.confidence = std::min(last.confidence, 0.7);
        last.note = joined("no probed member dominates x", last.note);
        return last;
    }
    return Verdict::inconclusive("no probed member dominates x and no violation trend was found",
                                 0.25);
}

// ---------------------------------------------------------------------------
// Negligibility
// ---------------------------------------------------------------------------

Verdict negligibleNumeric(const Net& x, const Gauge& z) {
    const int probes = z.family() == Gauge::Family::Generators
                           ? static_cast<int>(z.members().size())
                           : 6;
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (int j = 1; j <= probes; ++j) {
        const RateExpr recip = rx::pow(z.memberExprAt(j), Rational(-1));
        Verdict v = bigO(x, netOf(recip, z.index()));
        if (v.fails()) {
            v.note = joined("member " + z.memberExprAt(j).str() + " blocks", v.note);
            v.confidence = std::min(v.confidence, 0.8);
            return v;
        }
        acc = Verdict::both(acc, v);
    }
    if (acc.holds()) {
        acc.mode = Mode::Numeric;
        acc.confidence = std::min(acc.confidence == 0 ? 0.75 : acc.confidence, 0.75);
        acc.note = joined("all probed reciprocal members dominate x (" + std::to_string(probes) +
                              " probes); deeper members unverified",
                          acc.note);
        return acc;
    }
    return Verdict::inconclusive("reciprocal-member probes were inconclusive", 0.25);
}

// Every member of g is O(u) (strict: o(u)). u is given as an expression over
// g's index set.
Verdict allMembersDominatedByNet(const Gauge& g, const RateExpr& u, bool strict);

// Does u strictly dominate every member of g (each member is o(u))? Used
// with u = the decay exponent of a candidate negligible net.
Verdict escapesFamilyStrict(const RateExpr& u, const Gauge& g) {
    return allMembersDominatedByNet(g, u, true);
}

Verdict allMembersDominatedByNet(const Gauge& g, const RateExpr& u, bool strict) {
    const auto nfu = tryNF(u, g.index());
    if (!nfu || nfu->isZero())
        return Verdict::inconclusive("comparison net leaves the decidable fragment");
    const Witness structural{1.0, 1.0, false};
    switch (g.family()) {
        case Gauge::Family::Powers: {
            const auto nfb = tryNF(g.base(), g.index());
            if (!nfb || nfb->isZero())
                return Verdict::inconclusive("power base leaves the decidable fragment");
            const PowerEscape esc = escapesAllPowers(*nfu, *nfb);
            if (esc.escapes)
                return Verdict::holdsExact(structural, u.str() + " dominates every power of " +
                                                           g.base().str());
            return Verdict::failsExact(
                {}, "power " + rx::pow(g.base(), Rational(esc.blockingExponent)).str() +
                        " is not dominated by " + u.str());
        }
        case Gauge::Family::Generators: {
            for (const RateExpr& m : g.members()) {
                const auto nfm = tryNF(m, g.index());
                if (!nfm) return Verdict::inconclusive("generator leaves the decidable fragment");
                if (nfm->isZero()) continue;
                const OrderRel rel = compare_O(*nfm, *nfu);
                const bool covered = strict ? rel == OrderRel::XbigOofY
                                            : (rel == OrderRel::XbigOofY || rel == OrderRel::Both);
                if (!covered)
                    return Verdict::failsExact({}, "generator " + m.str() + " is not " +
                                                       (strict ? "strictly " : "") +
                                                       "dominated by " + u.str());
            }
            return Verdict::holdsExact(structural, "every generator is dominated by " + u.str());
        }
        case Gauge::Family::Towers: {
            if (nfu->dominant().hyperExp.isPositive())
                return Verdict::holdsExact(structural,
                                           "super-exponential growth dominates every tower");
            return Verdict::failsExact({}, "no fixed growth class dominates every iterated "
                                           "exponential");
        }
        case Gauge::Family::ExpOf: {
            // exp(H b) = O(u) for every H forces b = o(log u).
            Verdict v = allMembersDominatedByNet(g.inner(), rx::log(u), true);
            v.note = joined("via logarithms", v.note);
            return v;
        }
    }
    return Verdict::inconclusive();
}

Verdict negPowers(const Net& x, const NormalForm& nfx, const Gauge& z) {
    const RateExpr& base = z.base();
    const auto nfb = tryNF(base, z.index());
    if (!nfb || nfb->isZero()) return negligibleNumeric(x, z);
    const Term& dx = nfx.dominant();
    const Term& db = nfb->dominant();
    if (db.hyperExp.isPositive()) {
        long long a = 1;
        if (dx.hyperExp.isNegative()) a = ((-dx.hyperExp) / db.hyperExp).floorToInt() + 1;
        return sealFails(x, rx::pow(base, Rational(-a)), z.index(),
                         "reciprocal powers of a super-exponential base fall below any fixed "
                         "class; exponent " +
                             std::to_string(a) + " already blocks");
    }
    if (dx.hyperExp.isPositive())
        return sealFails(x, rx::pow(base, Rational(-1)), z.index(),
                         "x grows super-exponentially");
    if (dx.hyperExp.isNegative()) {
        Verdict v = bigO(x, netOf(rx::pow(base, Rational(-3)), z.index()));
        if (!v.holds()) return negligibleNumeric(x, z);
        v.note = joined("super-exponential decay passes below every reciprocal power; "
                        "displayed bound against exponent 3",
                        v.note);
        return v;
    }
    if (db.w.isZero()) return negligibleNumeric(x, z);
    const auto mb = db.w.coef.begin();
    if (!(mb->second.isPositive() && mb->first.trend() == Monomial::Trend::Grows))
        return negligibleNumeric(x, z);
    if (!dx.w.isZero()) {
        const auto mx = dx.w.coef.begin();
        if (mx->first.growthCompare(mb->first) > 0) {
            if (mx->second.isNegative()) {
                Verdict v = bigO(x, netOf(rx::pow(base, Rational(-3)), z.index()));
                if (!v.holds()) return negligibleNumeric(x, z);
                v.note = joined("the decay class exp(" +
                                    rx::mul(rx::lit(mx->second), monomialExpr(mx->first)).str() +
                                    ") falls below every reciprocal power; displayed bound "
                                    "against exponent 3",
                                v.note);
                return v;
            }
            return sealFails(x, rx::pow(base, Rational(-1)), z.index(),
                             "x grows above the base's whole power scale");
        }
    }
    // No class of x sits above the base class: some finite exponent blocks.
    Rational cx(0);
    if (auto it = dx.w.coef.find(mb->first); it != dx.w.coef.end()) cx = it->second;
    const long long cap = std::max<long long>(1, ((-cx) / mb->second).floorToInt() + 2);
    long long blocking = cap;
    for (long long a = 1; a <= cap; ++a) {
        const ExpPoly sum = dx.w.plus(db.w.scaled(Rational(a)));
        if (sum.isZero()) continue;
        const auto top = sum.coef.begin();
        if (top->second.isPositive() && top->first.trend() == Monomial::Trend::Grows) {
            blocking = a;
            break;
        }
    }
    return sealFails(x, rx::pow(base, Rational(-blocking)), z.index(),
                     "exponent " + std::to_string(blocking) + " blocks");
}

Verdict negTowers(const Net& x, const NormalForm& nfx, const Gauge& z) {
    const Term& dx = nfx.dominant();
    if (dx.hyperExp.isNegative()) {
        Verdict v = bigO(x, netOf(rx::pow(z.memberExprAt(2), Rational(-1)), z.index()));
        if (!v.holds()) return negligibleNumeric(x, z);
        v.note = joined("super-exponential decay passes below every reciprocal tower; "
                        "displayed bound against level 2",
                        v.note);
        return v;
    }
    int k = 1;
    if (dx.hyperExp.isZero() && !dx.w.isZero()) {
        const auto top = dx.w.coef.begin();
        if (!top->first.isConstant()) k = std::max(1, top->first.powers.begin()->first + 2);
    }
    return sealFails(x, rx::pow(z.memberExprAt(k), Rational(-1)), z.index(),
                     "tower level " + std::to_string(k) + " blocks");
}

Verdict negGenerators(const Net& x, const Gauge& z) {
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (const RateExpr& m : z.members()) {
        Verdict v = bigO(x, netOf(rx::pow(m, Rational(-1)), z.index()));
        if (v.fails()) {
            v.note = joined("member " + m.str() + " blocks", v.note);
            return v;
        }
        if (!v.holds()) return Verdict::inconclusive("bound against member " + m.str() +
                                                     " was inconclusive");
        acc = Verdict::both(acc, v);
    }
    acc.note = joined("below every reciprocal generator", acc.note);
    return acc;
}

Verdict negExpOf(const Net& x, const NormalForm& nfx, const Gauge& z) {
    const Term& dx = nfx.dominant();
    auto probeFails = [&](const std::string& reason) {
        for (int k = 1; k <= 4; ++k) {
            const RateExpr recip = rx::pow(z.memberExprAt(k), Rational(-1));
            Verdict v = bigO(x, netOf(recip, z.index()));
            if (v.fails())
                return Verdict::failsExact(v.counterexample,
                                           joined(reason, "already fails against member " +
                                                              z.memberExprAt(k).str()));
        }
        return Verdict::failsExact({}, reason);
    };
    if (dx.hyperExp.isNegative()) {
        Verdict v = bigO(x, netOf(rx::pow(z.memberExprAt(2), Rational(-1)), z.index()));
        if (!v.holds()) return negligibleNumeric(x, z);
        v.note = joined("super-exponential decay passes below every reciprocal exponential; "
                        "displayed bound against member 2",
                        v.note);
        return v;
    }
    if (dx.hyperExp.isPositive()) return probeFails("x grows super-exponentially");
    if (dx.w.isZero()) return probeFails("x does not decay exponentially");
    const auto top = dx.w.coef.begin();
    if (!(top->second.isNegative() && top->first.trend() == Monomial::Trend::Grows))
        return probeFails("x does not decay exponentially");
    // x ~ c exp(-u) with u -> +infinity; x is negligible iff u strictly
    // dominates every inner member.
    const RateExpr u = expPolyExpr(dx.w.scaled(Rational(-1)));
    Verdict esc = escapesFamilyStrict(u, z.inner());
    if (esc.holds()) {
        Verdict v = bigO(x, netOf(rx::pow(z.memberExprAt(2), Rational(-1)), z.index()));
        if (!v.holds()) return negligibleNumeric(x, z);
        v.note = joined("the decay exponent " + u.str() +
                            " strictly dominates the inner family; displayed bound against "
                            "member 2",
                        joined(esc.note, v.note));
        return v;
    }
    if (esc.fails()) return probeFails(joined("the decay exponent " + u.str() +
                                                  " does not outrun the inner family",
                                              esc.note));
    return negligibleNumeric(x, z);
}

// ---------------------------------------------------------------------------
// Axiom checks
// ---------------------------------------------------------------------------

bool hasPosInfMember(const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers:
            return limitOf(netOf(g.base(), g.index())).kind == LimitValue::Kind::PlusInf;
        case Gauge::Family::Generators:
            for (const RateExpr& m : g.members())
                if (limitOf(netOf(m, g.index())).kind == LimitValue::Kind::PlusInf) return true;
            return false;
        case Gauge::Family::Towers: return true;
        case Gauge::Family::ExpOf: return hasPosInfMember(g.inner());
    }
    return false;
}

Verdict axiomWellFormed(const Gauge& g) {
    if (g.family() == Gauge::Family::Generators && g.members().empty())
        return Verdict::failsExact({}, "empty generator list");
    std::string what;
    switch (g.family()) {
        case Gauge::Family::Powers: what = "power family"; break;
        case Gauge::Family::Generators:
            what = std::to_string(g.members().size()) +
                   (g.members().size() == 1 ? " generator" : " generators");
            break;
        case Gauge::Family::ExpOf: what = "exponential family"; break;
        case Gauge::Family::Towers: what = "iterated exponentials"; break;
    }
    return Verdict::holdsExact({1.0, 1.0, true},
                               what + " over " + g.index().name());
}

Verdict verdictFromLimit(const LimitValue& lv, const std::string& who) {
    switch (lv.kind) {
        case LimitValue::Kind::PlusInf:
        case LimitValue::Kind::MinusInf:
        case LimitValue::Kind::UnsignedInf: {
            Verdict v{Status::Holds, lv.mode, Witness{1.0, 1.0, lv.exact}, {}, 0.0, {}};
            v.confidence = lv.mode == Mode::Exact ? 1.0 : lv.confidence;
            v.note = who + " tends to " + limitKindName(lv.kind);
            return v;
        }
        case LimitValue::Kind::Finite:
            return {Status::Fails, lv.mode, std::nullopt, {}, lv.mode == Mode::Exact ? 1.0 : lv.confidence,
                    who + " stays bounded (limit " + std::to_string(lv.value) + ")"};
        case LimitValue::Kind::None:
            return Verdict::inconclusive(who + " has no recognisable limit", 0.2);
    }
    return Verdict::inconclusive();
}

Verdict axiomInfinite(const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers:
            return verdictFromLimit(limitOf(netOf(g.base(), g.index())), "the base");
        case Gauge::Family::Generators: {
            if (g.members().empty()) return Verdict::failsExact({}, "empty generator list");
            Verdict best = Verdict::failsExact({}, "every generator stays bounded");
            for (const RateExpr& m : g.members()) {
                const Verdict v = verdictFromLimit(limitOf(netOf(m, g.index())),
                                                   "generator " + m.str());
                if (v.holds()) return v;
                if (v.status == Status::Inconclusive) best = v;
            }
            return best;
        }
        case Gauge::Family::Towers:
            return Verdict::holdsExact({1.0, 1.0, true}, "exp(1/eps) tends to +inf");
        case Gauge::Family::ExpOf:
            if (hasPosInfMember(g.inner()))
                return Verdict::holdsExact({1.0, 1.0, true},
                                           "an inner member tends to +inf, so its exponential "
                                           "is infinite");
            return Verdict::failsExact({}, "no inner member tends to +inf");
    }
    return Verdict::inconclusive();
}

// Is the product expression dominated by the candidate member?
struct Coverage {
    bool covered = false;
    bool exact = true;
    double confidence = 1.0;
};

Coverage coveredBy(const RateExpr& prod, const RateExpr& cand, const IndexSet& index) {
    const auto np = tryNF(prod, index);
    const auto nc = tryNF(cand, index);
    if (np && nc) {
        if (np->isZero()) return {true, true, 1.0};
        if (nc->isZero()) return {false, true, 1.0};
        const OrderRel rel = compare_O(*np, *nc);
        return {rel == OrderRel::XbigOofY || rel == OrderRel::Both, true, 1.0};
    }
    const Verdict v = bigO(netOf(prod, index), netOf(cand, index));
    return {v.holds(), false, v.confidence};
}

Verdict axiomAbsSums(const Gauge& g);

Verdict axiomProducts(const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers:
            return Verdict::holdsExact({1.0, 1.0, true},
                                       "exponents add: base^a * base^b = base^(a+b)");
        case Gauge::Family::Towers:
            return Verdict::holdsExact({1.0, 1.0, true},
                                       "exp@j * exp@k is dominated by exp@(max(j,k)+1)");
        case Gauge::Family::ExpOf: {
            Verdict v = axiomAbsSums(g.inner());
            v.note = joined("exp(H1 b1) * exp(H2 b2) = exp(H1 b1 + H2 b2); reduces to the "
                            "absolute-sum axiom of the inner family",
                            v.note);
            return v;
        }
        case Gauge::Family::Generators: {
            if (g.members().empty()) return Verdict::failsExact({}, "empty generator list");
            bool allExact = true;
            double conf = 1.0;
            const auto& ms = g.members();
            for (std::size_t i = 0; i < ms.size(); ++i) {
                for (std::size_t j = i; j < ms.size(); ++j) {
                    const RateExpr prod = rx::mul(ms[i], ms[j]);
                    bool covered = false;
                    for (auto it = ms.rbegin(); it != ms.rend(); ++it) {
                        const Coverage c = coveredBy(prod, *it, g.index());
                        if (c.covered) {
                            covered = true;
                            allExact = allExact && c.exact;
                            conf = std::min(conf, c.confidence);
                            break;
                        }
                    }
                    if (!covered) {
                        const Verdict probe =
                            bigO(netOf(prod, g.index()), netOf(ms.back(), g.index()));
                        return Verdict::failsExact(
                            probe.counterexample,
                            "offending pair (" + ms[i].str() + ", " + ms[j].str() +
                                "): product " + prod.str() + " escapes every member");
                    }
                }
            }
            if (allExact)
                return Verdict::holdsExact({1.0, 1.0, true},
                                           "all pairwise products dominated within the family");
            return Verdict::holdsNumeric({1.0, 1.0, false}, std::min(conf, 0.85),
                                         "all pairwise products dominated (numeric checks)");
        }
    }
    return Verdict::inconclusive();
}

Verdict axiomAbsSums(const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers:
            if (g.positive())
                return Verdict::holdsExact({1.0, 1.0, true},
                                           "base^max(a,b) dominates |base^a| + |base^b| and is "
                                           "eventually positive");
            return Verdict::inconclusive("base is not eventually positive; no positive "
                                         "dominating member identified");
        case Gauge::Family::Towers:
            return Verdict::holdsExact({1.0, 1.0, true},
                                       "exp@max(j,k) dominates the sum; towers are positive");
        case Gauge::Family::ExpOf: {
            Verdict v = axiomAbsSums(g.inner());
            v.note = joined("|e1| + |e2| <= 2 exp(max of exponents); reduces to the "
                            "absolute-sum axiom of the inner family (exponentials are "
                            "positive)",
                            v.note);
            return v;
        }
        case Gauge::Family::Generators: {
            if (g.members().empty()) return Verdict::failsExact({}, "empty generator list");
            bool allExact = true;
            double conf = 1.0;
            const auto& ms = g.members();
            for (std::size_t i = 0; i < ms.size(); ++i) {
                for (std::size_t j = i; j < ms.size(); ++j) {
                    const RateExpr sum = rx::add(rx::absv(ms[i]), rx::absv(ms[j]));
                    bool covered = false;
                    for (auto it = ms.rbegin(); it != ms.rend(); ++it) {
                        if (!eventuallyPositiveExpr(*it, g.index())) continue;
                        const Coverage c = coveredBy(sum, *it, g.index());
                        if (c.covered) {
                            covered = true;
                            allExact = allExact && c.exact;
                            conf = std::min(conf, c.confidence);
                            break;
                        }
                    }
                    if (!covered)
                        return Verdict::failsExact(
                            {}, "offending pair (" + ms[i].str() + ", " + ms[j].str() +
                                    "): no eventually positive member dominates " + sum.str());
                }
            }
            if (allExact)
                return Verdict::holdsExact({1.0, 1.0, true},
                                           "all pairwise absolute sums dominated by positive "
                                           "members");
            return Verdict::holdsNumeric({1.0, 1.0, false}, std::min(conf, 0.85),
                                         "all pairwise absolute sums dominated (numeric checks)");
        }
    }
    return Verdict::inconclusive();
}

// ---------------------------------------------------------------------------
// Family inclusion
// ---------------------------------------------------------------------------

Verdict includedImpl(const Gauge& a, const Gauge& b);

Verdict includedTowersIn(const Gauge& a, const Gauge& b) {
    const Witness structural{1.0, 1.0, false};
    switch (b.family()) {
        case Gauge::Family::Towers:
            return Verdict::holdsExact(structural, "same tower family");
        case Gauge::Family::Powers: {
            const auto nfb = tryNF(b.base(), b.index());
            if (!nfb || nfb->isZero())
                return Verdict::inconclusive("power base leaves the decidable fragment");
            if (nfb->dominant().hyperExp.isPositive())
                return Verdict::holdsExact(structural,
                                           "a super-exponential base dominates every iterated "
                                           "exponential");
            int blocking = 2;
            if (!nfb->dominant().w.isZero()) {
                const auto mb = nfb->dominant().w.coef.begin();
                if (!mb->first.isConstant())
                    blocking = std::max(1, mb->first.powers.begin()->first + 2);
            }
            const Verdict probe = bigO(a.memberAt(blocking),
                                       netOf(rx::pow(b.base(), Rational(12)), b.index()));
            return Verdict::failsExact(probe.counterexample,
                                       "tower level " + std::to_string(blocking) +
                                           " escapes every power of " + b.base().str());
        }
        case Gauge::Family::Generators: {
            for (const RateExpr& m : b.members()) {
                const auto nfm = tryNF(m, b.index());
                if (nfm && !nfm->isZero() && nfm->dominant().hyperExp.isPositive())
                    return Verdict::holdsExact(structural, "generator " + m.str() +
                                                               " dominates every tower");
            }
            return Verdict::failsExact({}, "no generator outruns all iterated exponentials");
        }
        case Gauge::Family::ExpOf: {
            Verdict v1 = isModerate(netOf(rx::epsInv(), a.index()), b.inner());
            Verdict v2 = includedTowersIn(a, b.inner());
            Verdict v = Verdict::both(v1, v2);
            v.note = joined("exp@k = exp(exp@(k-1)): needs 1/eps and every tower dominated "
                            "inside the inner family",
                            v.note);
            return v;
        }
    }
    return Verdict::inconclusive();
}

Verdict includedImpl(const Gauge& a, const Gauge& b) {
    const Witness structural{1.0, 1.0, false};
    switch (a.family()) {
        case Gauge::Family::Generators: {
            if (a.members().empty())
                return Verdict::holdsExact(structural, "empty family is trivially included");
            Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
            for (const RateExpr& m : a.members()) {
                Verdict v = isModerate(netOf(m, a.index()), b);
                if (!v.holds()) {
                    v.note = joined("generator " + m.str() + " is not moderate", v.note);
                    return v;
                }
                acc = Verdict::both(acc, v);
            }
            acc.note = "every generator is dominated";
            return acc;
        }
        case Gauge::Family::Powers: {
            if (b.family() == Gauge::Family::Generators) {
                const auto nfb = tryNF(a.base(), a.index());
                if (!nfb || nfb->isZero())
                    return Verdict::inconclusive("power base leaves the decidable fragment");
                long long worstBlock = 1;
                for (auto it = b.members().rbegin(); it != b.members().rend(); ++it) {
                    const auto nfm = tryNF(*it, b.index());
                    if (!nfm || nfm->isZero()) continue;
                    const PowerEscape esc = escapesAllPowers(*nfm, *nfb);
                    if (esc.escapes)
                        return Verdict::holdsExact(structural,
                                                   "member " + it->str() +
                                                       " dominates every power of " +
                                                       a.base().str());
                    worstBlock = std::max(worstBlock, esc.blockingExponent);
                }
                if (b.members().empty())
                    return Verdict::failsExact({}, "no members to dominate the powers");
                const Verdict probe = bigO(netOf(rx::pow(a.base(), Rational(worstBlock)), a.index()),
                                           netOf(b.members().back(), b.index()));
                return Verdict::failsExact(probe.counterexample,
                                           "power " +
                                               rx::pow(a.base(), Rational(worstBlock)).str() +
                                               " escapes every member");
            }
            Verdict v = isModerate(netOf(a.base(), a.index()), b);
            v.note = joined(v.holds() ? "the base is dominated, and powers follow by ring closure"
                                      : "the base itself escapes",
                            v.note);
            return v;
        }
        case Gauge::Family::Towers:
            return includedTowersIn(a, b);
        case Gauge::Family::ExpOf: {
            switch (b.family()) {
                case Gauge::Family::ExpOf: {
                    Verdict v = includedImpl(a.inner(), b.inner());
                    v.note = joined("inner inclusion lifts through exp", v.note);
                    return v;
                }
                case Gauge::Family::Towers: {
                    Verdict v = includedImpl(a.inner(), b);
                    v.note = joined("exponentials of tower-dominated exponents stay within "
                                    "the towers",
                                    v.note);
                    return v;
                }
                case Gauge::Family::Powers: {
                    const auto nfb = tryNF(b.base(), b.index());
                    if (!nfb || nfb->isZero())
                        return Verdict::inconclusive("power base leaves the decidable fragment");
                    if (nfb->dominant().hyperExp.isPositive())
                        return Verdict::holdsExact(structural,
                                                   "a super-exponential base swallows every "
                                                   "exponential member");
                    if (nfb->dominant().w.isZero())
                        return Verdict::failsExact({}, "the power base does not grow");
                    const RateExpr logOfBase = expPolyExpr(nfb->dominant().w);
                    Verdict v = allMembersDominatedByNet(a.inner(), logOfBase, false);
                    if (v.holds()) {
                        v.note = joined("every inner exponent is dominated by log of the base (" +
                                            logOfBase.str() + ")",
                                        v.note);
                        return v;
                    }
                    if (v.fails()) {
                        const Verdict probe = bigO(a.memberAt(3),
                                                   netOf(rx::pow(b.base(), Rational(12)), b.index()));
                        return Verdict::failsExact(
                            probe.counterexample,
                            joined("an inner exponent escapes log of the base", v.note));
                    }
                    return v;
                }
                case Gauge::Family::Generators: {
                    for (auto it = b.members().rbegin(); it != b.members().rend(); ++it) {
                        const auto nfm = tryNF(*it, b.index());
                        if (!nfm || nfm->isZero()) continue;
                        if (nfm->dominant().hyperExp.isPositive())
                            return Verdict::holdsExact(structural,
                                                       "member " + it->str() +
                                                           " dominates every exponential");
                        const Verdict v = allMembersDominatedByNet(a.inner(), rx::log(*it), true);
                        if (v.holds())
                            return Verdict::holdsExact(structural,
                                                       "member " + it->str() +
                                                           " dominates every exponential "
                                                           "member (" +
                                                           v.note + ")");
                    }
                    // No single member covers; demonstrate the escape.
                    for (int j = 2; j <= 4; ++j) {
                        bool allFail = true;
                        Verdict lastFail = Verdict::inconclusive();
                        for (const RateExpr& m : b.members()) {
                            const Verdict v = bigO(a.memberAt(j), netOf(m, b.index()));
                            if (v.fails()) lastFail = v;
                            else allFail = false;
                        }
                        if (allFail && !b.members().empty())
                            return Verdict::failsExact(lastFail.counterexample,
                                                       "exponential member " +
                                                           a.memberExprAt(j).str() +
                                                           " escapes every generator");
                    }
                    return Verdict::inconclusive("no single generator dominates the "
                                                 "exponential family, and no clean escape "
                                                 "was demonstrated");
                }
            }
            return Verdict::inconclusive();
        }
    }
    return Verdict::inconclusive();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gauge construction
// ---------------------------------------------------------------------------

Gauge buildGauge(Gauge::Family family, const RateExpr& base, Gauge::ExponentDomain dom,
                 std::vector<RateExpr> members, std::shared_ptr<const Gauge> inner,
                 IndexSet index, bool validate) {
    Gauge g;
    g.family_ = family;
    g.dom_ = dom;
    g.base_ = base;
    g.members_ = std::move(members);
    g.inner_ = std::move(inner);
    g.index_ = index;
    if (family == Gauge::Family::Generators)
        std::stable_sort(g.members_.begin(), g.members_.end(),
                         [&](const RateExpr& x, const RateExpr& y) {
                             return growthLessExpr(x, y, g.index_);
                         });
    switch (family) {
        case Gauge::Family::Powers:
            g.positive_ = eventuallyPositiveExpr(g.base_, g.index_);
            g.totallyOrdered_ = g.positive_;
            break;
        case Gauge::Family::Generators: {
            g.positive_ = true;
            g.totallyOrdered_ = true;
            for (const RateExpr& m : g.members_)
                g.positive_ = g.positive_ && eventuallyPositiveExpr(m, g.index_);
            for (std::size_t i = 0; i + 1 < g.members_.size() && g.totallyOrdered_; ++i)
                for (std::size_t j = i + 1; j < g.members_.size(); ++j)
                    if (!comparableExprs(g.members_[i], g.members_[j], g.index_)) {
                        g.totallyOrdered_ = false;
                        break;
                    }
            break;
        }
        case Gauge::Family::ExpOf:
            g.positive_ = true;
            g.totallyOrdered_ = g.inner_->totallyOrdered();
            break;
        case Gauge::Family::Towers:
            g.positive_ = true;
            g.totallyOrdered_ = true;
            break;
    }
    if (validate) {
        if (family == Gauge::Family::Powers) {
            const LimitValue lv = limitOf(netOf(g.base_, g.index_));
            if (lv.kind != LimitValue::Kind::PlusInf)
                throw ConstructionError("the base of a power family must tend to +infinity; " +
                                        g.base_.str() + " tends to " + limitKindName(lv.kind));
        }
        if (family == Gauge::Family::ExpOf) {
            // Exponentials of super-exponential members leave the fragment.
            const Gauge* cur = g.inner_.get();
            while (cur) {
                if (cur->family() == Gauge::Family::Powers) {
                    const auto nf = tryNF(cur->base(), cur->index());
                    if (nf && !nf->isZero() && !nf->dominant().hyperExp.isZero())
                        throw ConstructionError(
                            "cannot exponentiate a family with super-exponential members");
                    break;
                }
                if (cur->family() == Gauge::Family::Generators) {
                    for (const RateExpr& m : cur->members()) {
                        const auto nf = tryNF(m, cur->index());
                        if (nf && !nf->isZero() && !nf->dominant().hyperExp.isZero())
                            throw ConstructionError(
                                "cannot exponentiate a family with super-exponential members");
                    }
                    break;
                }
                if (cur->family() == Gauge::Family::ExpOf) {
                    cur = &cur->inner();
                    continue;
                }
                break;  // Towers exponentiate to towers
            }
        }
        const AxiomReport r = checkAxioms(g);
        if (!r.allHold())
            throw ConstructionError("family fails the gauge axioms:\n" + r.summary());
        g.validated_ = true;
    }
    return g;
}

Gauge Gauge::powers(const RateExpr& base, ExponentDomain dom, IndexSet index) {
    return buildGauge(Family::Powers, base, dom, {}, nullptr, index, true);
}

Gauge Gauge::generators(std::vector<RateExpr> members, IndexSet index) {
    return buildGauge(Family::Generators, RateExpr(), ExponentDomain::AllPositiveReals,
                      std::move(members), nullptr, index, true);
}

Gauge Gauge::expOf(const Gauge& inner) {
    return buildGauge(Family::ExpOf, RateExpr(), ExponentDomain::AllPositiveReals, {},
                      std::make_shared<const Gauge>(inner), inner.index(), true);
}

Gauge Gauge::towers(IndexSet index) {
    return buildGauge(Family::Towers, RateExpr(), ExponentDomain::AllPositiveReals, {}, nullptr,
                      index, true);
}

Gauge Gauge::uncheckedPowers(const RateExpr& base, ExponentDomain dom, IndexSet index) {
    return buildGauge(Family::Powers, base, dom, {}, nullptr, index, false);
}

Gauge Gauge::uncheckedGenerators(std::vector<RateExpr> members, IndexSet index) {
    return buildGauge(Family::Generators, RateExpr(), ExponentDomain::AllPositiveReals,
                      std::move(members), nullptr, index, false);
}

const RateExpr& Gauge::base() const {
    if (family_ != Family::Powers) throw ArgumentError("base() is defined for power families");
    return base_;
}

const std::vector<RateExpr>& Gauge::members() const {
    if (family_ != Family::Generators)
        throw ArgumentError("members() is defined for generator families");
    return members_;
}

const Gauge& Gauge::inner() const {
    if (family_ != Family::ExpOf || !inner_)
        throw ArgumentError("inner() is defined for exponential families");
    return *inner_;
}

RateExpr Gauge::memberExprAt(int j) const {
    if (j < 1) throw ArgumentError("member index must be >= 1");
    switch (family_) {
        case Family::Powers: return rx::pow(base_, Rational(j));
        case Family::Generators: {
            if (members_.empty()) throw ArgumentError("empty generator family has no members");
            const std::size_t idx = std::min<std::size_t>(j, members_.size()) - 1;
            return members_[idx];
        }
        case Family::ExpOf:
            return rx::exp(rx::mul(rx::lit(j), inner_->memberExprAt(j)));
        case Family::Towers: return rx::expIter(j, rx::epsInv());
    }
    throw ArgumentError("unknown family");
}

Net Gauge::memberAt(int j) const { return Net::symbolic(memberExprAt(j), index_); }

Gauge Gauge::composedWith(const RateExpr& scale) const {
    if (index_.kind != IndexSet::Kind::HalfOpenUnit)
        throw ArgumentError("composition is defined over the half-open unit index");
    const Net scaleNet = Net::symbolic(scale);
    const LimitValue lv = limitOf(scaleNet);
    if (!(lv.kind == LimitValue::Kind::Finite && std::fabs(lv.value) < 1e-12) ||
        !orderGt(scaleNet, Net::zero()).holds())
        throw ArgumentError("the composition scale must decrease to 0+");
    Gauge g = *this;
    g.index_ = IndexSet::composed(scale);
    if (inner_) g.inner_ = std::make_shared<const Gauge>(inner_->composedWith(scale));
    return g;
}

namespace {
std::string bareDesc(const Gauge& g) {
    switch (g.family()) {
        case Gauge::Family::Powers:
            return (g.exponentDomain() == Gauge::ExponentDomain::Naturals ? "powers_nat("
                                                                          : "powers(") +
                   g.base().str() + ")";
        case Gauge::Family::Generators: {
            std::string s = "gens[";
            bool first = true;
            for (const RateExpr& m : g.members()) {
                if (!first) s += ", ";
                s += m.str();
                first = false;
            }
            return s + "]";
        }
        case Gauge::Family::ExpOf: return "expof(" + bareDesc(g.inner()) + ")";
        case Gauge::Family::Towers: return "towers()";
    }
    return "?";
}
}  // namespace

std::string Gauge::describe() const {
    std::string s = bareDesc(*this);
    if (index_.kind == IndexSet::Kind::Composed)
        return "comp(" + s + ", " + index_.scale.str() + ")";
    if (index_.kind == IndexSet::Kind::NaturalsFrechet) return s + " @ naturals";
    return s;
}

// ---------------------------------------------------------------------------
// Reports and operations
// ---------------------------------------------------------------------------

bool AxiomReport::allHold() const {
    for (const Verdict* v : perAxiom())
        if (!v->holds()) return false;
    return true;
}

std::string AxiomReport::summary() const {
    static const char* labels[5] = {"(i) well-formed family", "(ii) infinite member",
                                    "(iii) product closure", "(iv) scalar closure",
                                    "(v) absolute-sum closure"};
    std::ostringstream os;
    const auto axs = perAxiom();
    for (int i = 0; i < 5; ++i) {
        os << labels[i] << ": " << statusName(axs[i]->status);
        if (!axs[i]->note.empty()) os << " -- " << axs[i]->note;
        os << '\n';
    }
    return os.str();
}

AxiomReport checkAxioms(const Gauge& g) {
    AxiomReport r;
    r.wellFormed = axiomWellFormed(g);
    r.infiniteMember = axiomInfinite(g);
    r.productClosure = axiomProducts(g);
    r.scalarClosure = Verdict::holdsExact(
        {1.0, 1.0, true}, "any scalar folds into the big-O constant; sigma = i itself");
    r.absSumClosure = axiomAbsSums(g);
    return r;
}

Verdict isModerate(const Net& x, const Gauge& g) {
    if (!x.index().same(g.index()))
        throw ArgumentError("moderateness needs x over the gauge's index set");
    std::optional<NormalForm> nf = tryNF(x);
    if (!nf) return moderateNumeric(x, g);
    if (nf->isZero())
        return sealHolds(x, g.memberExprAt(1), g.index(), "zero net");
    const Pick p = pickMember(*nf, g);
    if (p.degenerate) return moderateNumeric(x, g);
    if (p.ok) return sealHolds(x, p.member, g.index(), {});
    return sealFails(x, p.probe, g.index(), p.reason);
}

Verdict isNegligibleNum(const Net& x, const Gauge& z) {
    if (!x.index().same(z.index()))
        throw ArgumentError("negligibility needs x over the gauge's index set");
    if (!z.positive()) throw ArgumentError("negligibility requires a positive gauge");
    std::optional<NormalForm> nf = tryNF(x);
    if (!nf) return negligibleNumeric(x, z);
    if (nf->isZero())
        return Verdict::holdsExact({1.0, 1.0, true}, "the zero net is negligible for every gauge");
    switch (z.family()) {
        case Gauge::Family::Powers: return negPowers(x, *nf, z);
        case Gauge::Family::Towers: return negTowers(x, *nf, z);
        case Gauge::Family::Generators: return negGenerators(x, z);
        case Gauge::Family::ExpOf: return negExpOf(x, *nf, z);
    }
    return Verdict::inconclusive();
}

PrincipalityResult principalGenerator(const Gauge& g) {
    PrincipalityResult r;
    switch (g.family()) {
        case Gauge::Family::Powers:
            r.generator = g.base();
            r.note = "every member is a power of the base";
            return r;
        case Gauge::Family::Towers:
            r.candidate = g.memberExprAt(1);
            r.escaper = g.memberExprAt(2);
            r.note = "no single level generates: the next iterated exponential escapes every "
                     "power of a fixed level";
            return r;
        case Gauge::Family::Generators: {
            if (g.members().empty()) {
                r.note = "empty family has no generator";
                return r;
            }
            const RateExpr top = g.members().back();
            const auto nft = tryNF(top, g.index());
            for (const RateExpr& m : g.members()) {
                const auto nfm = tryNF(m, g.index());
                if (!nfm || !nft) {
                    r.note = "members leave the decidable fragment; no generator identified";
                    return r;
                }
                if (nfm->isZero()) continue;
                Gauge ag = Gauge::uncheckedPowers(top, Gauge::ExponentDomain::Naturals, g.index());
                const Pick p = pickPowers(*nfm, top, ag);
                if (!p.ok || p.powerExponent > 20) {
                    r.candidate = top;
                    r.escaper = m;
                    r.note = "member " + m.str() + " escapes every tried power of " + top.str();
                    return r;
                }
            }
            r.generator = top;
            r.note = "every member is dominated by a power of the top generator";
            return r;
        }
        case Gauge::Family::ExpOf: {
            const Gauge& inner = g.inner();
            if (inner.family() == Gauge::Family::Generators && !inner.members().empty()) {
                const RateExpr top = inner.members().back();
                const auto nft = tryNF(top, inner.index());
                bool allBelow = nft && !nft->isZero();
                for (const RateExpr& m : inner.members()) {
                    const auto nfm = tryNF(m, inner.index());
                    if (!nfm || nfm->isZero()) continue;
                    const OrderRel rel = compare_O(*nfm, *nft);
                    if (!(rel == OrderRel::XbigOofY || rel == OrderRel::Both)) {
                        allBelow = false;
                        break;
                    }
                }
                if (allBelow) {
                    r.generator = rx::exp(top);
                    r.note = "the top inner generator exponentiates to a generator";
                    return r;
                }
            }
            r.candidate = g.memberExprAt(1);
            if (inner.family() == Gauge::Family::Powers)
                r.escaper = rx::exp(rx::pow(inner.base(), Rational(2)));
            else
                r.escaper = rx::exp(inner.memberExprAt(2));
            r.note = "squared exponents escape every power of a single exponential member";
            return r;
        }
    }
    return r;
}

Gauge expGauge(const Gauge& g) { return Gauge::expOf(g); }

Verdict familyIncluded(const Gauge& a, const Gauge& b) {
    if (!a.index().same(b.index()))
        throw ArgumentError("family inclusion needs a common index set");
    Verdict v = includedImpl(a, b);
    v.note = joined("R_M(" + a.describe() + ") in R_M(" + b.describe() + ")", v.note);
    return v;
}

Verdict equivalentGauges(const Gauge& a, const Gauge& b) {
    const Verdict fwd = familyIncluded(a, b);
    if (fwd.fails()) {
        Verdict v = fwd;
        v.note = joined("not equivalent", v.note);
        return v;
    }
    const Verdict bwd = familyIncluded(b, a);
    Verdict v = Verdict::both(fwd, bwd);
    if (v.holds()) v.note = joined("mutual domination", v.note);
    return v;
}

Verdict idealCompatible(const Gauge& B, const Gauge& Z) {
    Verdict v = familyIncluded(B, Z);
    v.note = joined("decided via moderate-ring inclusion (absorption witness w = z * b)", v.note);
    return v;
}

AlgebraSpec AlgebraSpec::make(Gauge growth, Gauge negligibility) {
    if (!growth.index().same(negligibility.index()))
        throw ConstructionError("growth and negligibility families need a common index set");
    const Verdict v = familyIncluded(growth, negligibility);
    if (!v.holds())
        throw ConstructionError("the negligibility family cannot absorb the growth family: " +
                                v.note);
    AlgebraSpec s{std::move(growth), std::move(negligibility)};
    return s;
}

std::string AlgebraSpec::describe() const {
    return "(" + B.describe() + ", " + Z.describe() + ")";
}

Verdict algebraOrder(const AlgebraSpec& s1, const AlgebraSpec& s2) {
    const Verdict vB = familyIncluded(s1.B, s2.B);
    const Verdict vZ = familyIncluded(s1.Z, s2.Z);
    const Verdict self = Verdict::both(familyIncluded(s1.B, s1.Z), familyIncluded(s2.B, s2.Z));
    Verdict v = Verdict::both(Verdict::both(vB, vZ), self);
    if (v.holds()) {
        v.note = "both inclusions certified: growth " + s1.B.describe() + " in " +
                 s2.B.describe() + ", negligibility " + s1.Z.describe() + " in " +
                 s2.Z.describe();
    } else {
        std::string why;
        if (!vB.holds()) why = "growth inclusion fails: " + vB.note;
        if (!vZ.holds()) why = joined(why, "negligibility inclusion fails: " + vZ.note);
        if (!self.holds()) why = joined(why, "a spec's own growth-in-negligibility "
                                             "certification fails");
        v.note = why;
    }
    return v;
}

}  // namespace agcal
