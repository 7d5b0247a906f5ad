#include "agcal/gen_number.hpp"

#include <cmath>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

bool sameSpec(const AlgebraSpec& s1, const AlgebraSpec& s2) {
    return s1.B.index().same(s2.B.index()) && s1.describe() == s2.describe();
}

void requireCompatible(const GenNumber& a, const GenNumber& b, const char* op) {
    if (!sameSpec(a.spec(), b.spec()))
        throw ArgumentError(std::string(op) + " needs operands over the same algebra spec: " +
                            a.spec().describe() + " vs " + b.spec().describe());
    if (a.dim() != b.dim())
        throw ArgumentError(std::string(op) + " needs operands of the same dimension: " +
                            std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

// Certificate for values produced by ring operations: the closure axioms
// guarantee moderateness, and a fresh check usually sharpens the witness.
Verdict closureCert(const std::vector<Net>& comps, const AlgebraSpec& spec,
                    const Verdict& inherited, const char* how) {
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    bool fresh = true;
    for (const Net& c : comps) {
        const Verdict v = isModerate(c, spec.B);
        if (!v.holds()) {
            fresh = false;
            break;
        }
        acc = Verdict::both(acc, v);
    }
    if (fresh) return acc;
    Verdict v = inherited;
    v.note = std::string("moderate by gauge closure (") + how + ")" +
             (v.note.empty() ? "" : "; from " + v.note);
    return v;
}

}  // namespace

GenNumber::GenNumber(std::vector<Net> comps, AlgebraSpec spec, Verdict cert)
    : comps_(std::move(comps)), spec_(std::move(spec)), cert_(std::move(cert)) {}

GenNumber GenNumber::make(Net rep, AlgebraSpec spec) {
    std::vector<Net> comps;
    comps.push_back(std::move(rep));
    return makeVec(std::move(comps), std::move(spec));
}

GenNumber GenNumber::makeVec(std::vector<Net> comps, AlgebraSpec spec) {
    if (comps.empty()) throw ArgumentError("a generalized number needs at least one component");
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (!comps[i].index().same(spec.B.index()))
            throw ArgumentError("component " + std::to_string(i) +
                                " lives over a different index set than the spec");
        const Verdict v = isModerate(comps[i], spec.B);
        if (!v.holds())
            throw ConstructionError("component " + std::to_string(i) + " (" +
                                    comps[i].describe() + ") is not certified moderate for " +
                                    spec.B.describe() +
                                    (v.note.empty() ? "" : ": " + v.note));
        acc = Verdict::both(acc, v);
    }
    return GenNumber(std::move(comps), std::move(spec), std::move(acc));
}

GenNumber GenNumber::zero(const AlgebraSpec& spec, int dim) {
    if (dim < 1) throw ArgumentError("dimension must be >= 1");
    std::vector<Net> comps(static_cast<std::size_t>(dim), Net::zero(spec.B.index()));
    return GenNumber(std::move(comps), spec,
                     Verdict::holdsExact({1.0, 1.0, true}, "zero representative"));
}

const Net& GenNumber::rep() const {
    if (comps_.size() != 1)
        throw ArgumentError("rep() reads a scalar; this value has dimension " +
                            std::to_string(comps_.size()));
    return comps_.front();
}

const Net& GenNumber::component(int i) const {
    if (i < 0 || i >= dim()) throw ArgumentError("component index out of range");
    return comps_[static_cast<std::size_t>(i)];
}

std::string GenNumber::describe() const {
    std::string s = "[";
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (i) s += "; ";
        s += comps_[i].describe();
    }
    return s + "] in " + spec_.describe();
}

GenNumber gnAdd(const GenNumber& a, const GenNumber& b) {
    requireCompatible(a, b, "gnAdd");
    std::vector<Net> comps;
    comps.reserve(a.comps_.size());
    for (std::size_t i = 0; i < a.comps_.size(); ++i) comps.push_back(a.comps_[i] + b.comps_[i]);
    const Verdict inherited = Verdict::both(a.cert_, b.cert_);
    Verdict cert = closureCert(comps, a.spec_, inherited, "sum of moderates");
    return GenNumber(std::move(comps), a.spec_, std::move(cert));
}

GenNumber gnMul(const GenNumber& a, const GenNumber& b) {
    requireCompatible(a, b, "gnMul");
    std::vector<Net> comps;
    comps.reserve(a.comps_.size());
    for (std::size_t i = 0; i < a.comps_.size(); ++i) comps.push_back(a.comps_[i] * b.comps_[i]);
    const Verdict inherited = Verdict::both(a.cert_, b.cert_);
    Verdict cert = closureCert(comps, a.spec_, inherited, "product of moderates");
    return GenNumber(std::move(comps), a.spec_, std::move(cert));
}

GenNumber gnNeg(const GenNumber& a) {
    std::vector<Net> comps;
    comps.reserve(a.comps_.size());
    for (const Net& c : a.comps_) comps.push_back(-c);
    return GenNumber(std::move(comps), a.spec_, a.cert_);
}

Verdict gnEq(const GenNumber& a, const GenNumber& b) {
    requireCompatible(a, b, "gnEq");
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (int i = 0; i < a.dim(); ++i) {
        const Verdict v = isNegligibleNum(a.component(i) - b.component(i), a.spec().Z);
        if (v.fails()) {
            Verdict out = v;
            if (a.dim() > 1)
                out.note = "component " + std::to_string(i) + " differs" +
                           (v.note.empty() ? "" : ": " + v.note);
            return out;
        }
        acc = Verdict::both(acc, v);
    }
    return acc;
}

Verdict isBoundedBy(const GenNumber& a, const Gauge& B0) {
    const Verdict incl = familyIncluded(B0, a.spec().B);
    if (!incl.holds())
        throw ArgumentError("bounded-by needs the probe family inside the spec's growth ring: " +
                            incl.note);
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (int i = 0; i < a.dim(); ++i) {
        const Verdict v = isModerate(a.component(i), B0);
        if (!v.holds()) return v;
        acc = Verdict::both(acc, v);
    }
    return acc;
}

GenNumber barProject(const GenNumber& a, const AlgebraSpec& target) {
    if (!target.B.index().same(a.spec().B.index()))
        throw ArgumentError("projection target lives over a different index set");
    const Verdict inclB = familyIncluded(target.B, a.spec().B);
    if (!inclB.holds())
        throw ArgumentError("the target growth family must embed into the source's: " +
                            inclB.note);
    const Verdict inclZ = familyIncluded(target.Z, a.spec().Z);
    if (!inclZ.holds())
        throw ArgumentError("the target negligibility family must embed into the source's: " +
                            inclZ.note);
    Verdict acc = Verdict::holdsExact({1.0, 1.0, true});
    for (int i = 0; i < a.dim(); ++i) {
        const Verdict v = isModerate(a.component(i), target.B);
        if (!v.holds())
            throw ArgumentError("representative is not bounded by the target growth family" +
                                (v.note.empty() ? std::string() : ": " + v.note));
        acc = Verdict::both(acc, v);
    }
    return GenNumber(a.comps_, target, std::move(acc));
}

CompactPoint::CompactPoint(Net rep, double lo, double hi, Verdict confined)
    : rep_(std::move(rep)), lo_(lo), hi_(hi), confined_(std::move(confined)) {}

CompactPoint CompactPoint::make(Net rep, double lo, double hi) {
    if (!(lo <= hi)) throw ArgumentError("compact hull needs lo <= hi");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw ArgumentError("compact hull needs finite endpoints");
    const Verdict v = eventually(rep.index(), [&](double eps) {
        try {
            const double x = rep.at(eps);
            return std::isfinite(x) && x >= lo && x <= hi;
        } catch (const std::exception&) {
            return false;
        }
    });
    if (!v.holds())
        throw ConstructionError("representative does not eventually stay in [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]" +
                                (v.note.empty() ? "" : ": " + v.note));
    return CompactPoint(std::move(rep), lo, hi, v);
}

}  // namespace agcal
