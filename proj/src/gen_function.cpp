#include "agcal/gen_function.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "agcal/asymptotics.hpp"
#include "agcal/errors.hpp"

namespace agcal {

namespace {

std::string windowText(const ClosedInterval& K) {
    std::ostringstream os;
    os << "[" << K.lo << ", " << K.hi << "]";
    return os.str();
}

void checkWindows(const std::vector<ClosedInterval>& windows, double lo, double hi) {
    if (windows.empty()) throw ArgumentError("need at least one compact window");
    for (const auto& K : windows) {
        if (!(K.lo <= K.hi) || !std::isfinite(K.lo) || !std::isfinite(K.hi))
            throw ArgumentError("compact window must be a finite closed interval");
        if (!(K.lo > lo && K.hi < hi))
            throw ArgumentError("window " + windowText(K) + " is not inside the open domain");
    }
}

// Conjunction over windows and derivative orders of a per-net check, with a
// single readable note instead of the concatenation both() would produce.
template <typename Check>
Verdict scanNets(const SmoothFamily& fam, const std::vector<ClosedInterval>& windows, int alphaMax,
                 const IndexSet& index, Check&& check, const std::string& holdsSummary) {
    std::optional<Verdict> acc;
    std::string detail;
    for (const auto& K : windows) {
        for (int alpha = 0; alpha <= alphaMax; ++alpha) {
            Net s = fam.supNorm(K.lo, K.hi, alpha, index);
            Verdict v = check(s, K, alpha);
            if (!v.holds() && detail.empty())
                detail = "order " + std::to_string(alpha) + " on " + windowText(K) +
                         (v.note.empty() ? "" : ": " + v.note);
            v.note.clear();
            acc = acc ? Verdict::both(*acc, v) : v;
            if (acc->fails()) {
                acc->note = detail;
                return *acc;
            }
        }
    }
    Verdict out = *acc;
    out.note = out.holds() ? holdsSummary : detail;
    return out;
}

Verdict moderationScan(const SmoothFamily& fam, const AlgebraSpec& spec,
                       const std::vector<ClosedInterval>& windows, int alphaMax) {
    return scanNets(
        fam, windows, alphaMax, spec.B.index(),
        [&](const Net& s, const ClosedInterval&, int) { return isModerate(s, spec.B); },
        "sup-norm nets dominated through derivative order " + std::to_string(alphaMax) + " on " +
            std::to_string(windows.size()) + " window(s)");
}

ClosedInterval defaultWindow(double lo, double hi) {
    double a = std::max(lo, -1.0), b = std::min(hi, 1.0);
    if (a < b) {
        // Keep the compact window strictly inside the open domain.
        double pad = 1e-3 * (b - a);
        if (a <= lo) a += pad;
        if (b >= hi) b -= pad;
        return {a, b};
    }
    if (std::isfinite(lo) && std::isfinite(hi)) {
        double w = hi - lo;
        return {lo + w / 3.0, hi - w / 3.0};
    }
    if (std::isfinite(lo)) return {lo + 0.5, lo + 1.5};
    return {hi - 1.5, hi - 0.5};
}

std::optional<RateExpr> composeExpr(const SmoothFamily& f, const RateExpr& xE) {
    using Form = SmoothFamily::Form;
    switch (f.form()) {
        case Form::SeparableSum: {
            std::vector<RateExpr> parts;
            for (const auto& t : f.terms()) {
                auto p = t.profile.exprAt(xE);
                if (!p) return std::nullopt;
                parts.push_back(rx::mul(t.coef, *p));
            }
            if (parts.empty()) return rx::lit(0);
            return parts.size() == 1 ? parts.front() : rx::add(parts);
        }
        case Form::ScaledKernel: {
            RateExpr arg = (f.shift() == 0.0)
                               ? rx::mul(f.scaleIn(), xE)
                               : rx::mul(f.scaleIn(), rx::sub(xE, rx::num(f.shift())));
            auto p = f.kernel().exprAt(arg);
            if (!p) return std::nullopt;
            return rx::mul(f.scaleOut(), *p);
        }
        case Form::BlackBox:
            return std::nullopt;
    }
    return std::nullopt;
}

void requireSameFrame(const GenFunction& a, const GenFunction& b) {
    if (a.spec().describe() != b.spec().describe() ||
        !a.spec().B.index().same(b.spec().B.index()))
        throw ArgumentError("operands live in different algebras: " + a.spec().describe() +
                            " vs " + b.spec().describe());
    if (a.domainLo() != b.domainLo() || a.domainHi() != b.domainHi())
        throw ArgumentError("operands live on different domains");
}

}  // namespace

// --- GenFunction -------------------------------------------------------

GenFunction GenFunction::make(SmoothFamily family, AlgebraSpec spec, double lo, double hi,
                              bool allowUncertified) {
    if (!(lo < hi)) throw ArgumentError("domain must be a nonempty open interval");
    int quickAlpha = std::min(2, family.derivBudget());
    Verdict cert = moderationScan(family, spec, {defaultWindow(lo, hi)}, quickAlpha);
    if (!cert.holds() && !allowUncertified)
        throw ConstructionError("family " + family.describe() +
                                " is not certified moderate for " + spec.describe() +
                                (cert.note.empty() ? "" : " (" + cert.note + ")") +
                                "; pass allowUncertified to carry it anyway");
    return GenFunction(std::move(family), std::move(spec), lo, hi, std::move(cert));
}

std::string GenFunction::describe() const {
    std::ostringstream os;
    os << family_.describe() << " | " << spec_.describe() << " on (" << lo_ << ", " << hi_ << ")";
    return os.str();
}

// --- budgets and membership tests --------------------------------------

FnBudget defaultBudget(const GenFunction& u) {
    return FnBudget{{defaultWindow(u.domainLo(), u.domainHi())}, 4, 8};
}

Verdict isModerateFn(const GenFunction& u, const std::vector<ClosedInterval>& windows,
                     int alphaMax) {
    checkWindows(windows, u.domainLo(), u.domainHi());
    if (alphaMax < 0) throw ArgumentError("derivative order must be >= 0");
    return moderationScan(u.family(), u.spec(), windows, alphaMax);
}

Verdict isModerateFn(const GenFunction& u) {
    FnBudget b = defaultBudget(u);
    return isModerateFn(u, b.windows, std::min(b.alphaMax, u.family().derivBudget()));
}

Verdict isNegligibleFn(const GenFunction& u, const std::vector<ClosedInterval>& windows,
                       int alphaMax, int mMax, const NumericOptions& opt) {
    checkWindows(windows, u.domainLo(), u.domainHi());
    if (alphaMax < 0) throw ArgumentError("derivative order must be >= 0");
    if (mMax < 1) throw ArgumentError("need at least one reciprocal power");
    const Gauge& Z = u.spec().Z;
    PrincipalityResult pr = principalGenerator(Z);
    if (pr.principal()) {
        RateExpr gen = *pr.generator;
        return scanNets(
            u.family(), windows, alphaMax, Z.index(),
            [&](const Net& s, const ClosedInterval& K, int alpha) {
                std::optional<Verdict> chain;
                for (int m = 1; m <= mMax; ++m) {
                    Net target = Net::symbolic(rx::pow(gen, Rational(-m)), Z.index());
                    Verdict v = bigO(s, target, opt);
                    if (!v.holds()) {
                        v.note = "not below (" + gen.str() + ")^-" + std::to_string(m) +
                                 " at order " + std::to_string(alpha) + " on " + windowText(K) +
                                 (v.note.empty() ? "" : "; " + v.note);
                        return v;
                    }
                    v.note.clear();
                    chain = chain ? Verdict::both(*chain, v) : v;
                }
                return *chain;
            },
            "below every reciprocal power of " + gen.str() + " up to m=" + std::to_string(mMax) +
                ", derivative order " + std::to_string(alphaMax));
    }
    return scanNets(
        u.family(), windows, alphaMax, Z.index(),
        [&](const Net& s, const ClosedInterval&, int) { return isNegligibleNum(s, Z); },
        "negligible against every family member, derivative order " + std::to_string(alphaMax));
}

Verdict isNegligibleFn(const GenFunction& u) {
    FnBudget b = defaultBudget(u);
    return isNegligibleFn(u, b.windows, std::min(b.alphaMax, u.family().derivBudget()), b.mMax);
}

// --- ring operations ----------------------------------------------------

GenFunction gfAdd(const GenFunction& a, const GenFunction& b) {
    requireSameFrame(a, b);
    return GenFunction::make(famAdd(a.family(), b.family()), a.spec(), a.domainLo(), a.domainHi(),
                             /*allowUncertified=*/true);
}

GenFunction gfMul(const GenFunction& a, const GenFunction& b) {
    requireSameFrame(a, b);
    return GenFunction::make(famMul(a.family(), b.family()), a.spec(), a.domainLo(), a.domainHi(),
                             /*allowUncertified=*/true);
}

GenFunction gfDeriv(const GenFunction& u) {
    return GenFunction::make(u.family().derivative(), u.spec(), u.domainLo(), u.domainHi(),
                             /*allowUncertified=*/true);
}

GenFunction gfRestrict(const GenFunction& u, double lo, double hi) {
    if (!(lo < hi) || lo < u.domainLo() || hi > u.domainHi())
        throw ArgumentError("restriction must be a nonempty subinterval of the domain");
    return GenFunction::make(u.family(), u.spec(), lo, hi, /*allowUncertified=*/true);
}

// --- point values and support -------------------------------------------

GenNumber pointValue(const GenFunction& u, const CompactPoint& x) {
    if (!(x.lo() > u.domainLo() && x.hi() < u.domainHi()))
        throw ArgumentError("the point's confinement interval must sit inside the domain");
    std::optional<Net> rep;
    if (x.rep().isSymbolic()) {
        if (auto e = composeExpr(u.family(), x.rep().expr()))
            rep = Net::symbolic(*e, u.spec().B.index());
    }
    if (!rep) {
        SmoothFamily fam = u.family();
        Net xn = x.rep();
        rep = Net::callable(
            [fam, xn](double eps) { return fam.eval(eps, xn.at(eps)); },
            u.describe() + " at point", u.spec().B.index());
    }
    return GenNumber::make(*rep, u.spec());
}

std::vector<ClosedInterval> supportEstimate(const GenFunction& u, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("resolution must be positive");
    double lo = u.domainLo(), hi = u.domainHi();
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw ArgumentError("support estimation needs a bounded domain");
    double width = hi - lo;
    int cells = std::clamp(static_cast<int>(std::ceil(width / tol)), 1, 400);
    double pad = 1e-6 * width;  // keep cells strictly inside the open domain

    std::vector<ClosedInterval> kept;
    for (int i = 0; i < cells; ++i) {
        ClosedInterval cell{lo + width * i / cells, lo + width * (i + 1) / cells};
        if (i == 0) cell.lo += pad;
        if (i == cells - 1) cell.hi -= pad;
        Verdict v = isNegligibleFn(u, {cell}, 0, 4);
        if (v.holds()) continue;
        if (!kept.empty() && std::abs(kept.back().hi - cell.lo) <= 2 * pad)
            kept.back().hi = cell.hi;
        else
            kept.push_back(cell);
    }
    return kept;
}

}  // namespace agcal
