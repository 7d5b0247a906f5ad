#pragma once

#include <string>
#include <vector>

#include "agcal/gauge.hpp"

namespace agcal {

// An element of the quotient of B-moderate nets by Z-negligible differences,
// scalar or vector valued. The stored representative is certified moderate at
// construction; equality of elements is a Verdict (negligibility of the
// difference), not a boolean, because numeric-mode representatives can stay
// undecided. Values are immutable and freely shareable.
class GenNumber {
public:
    // Throws ConstructionError unless every component is certified moderate
    // for spec's growth family.
    static GenNumber make(Net rep, AlgebraSpec spec);
    static GenNumber makeVec(std::vector<Net> comps, AlgebraSpec spec);
    static GenNumber zero(const AlgebraSpec& spec, int dim = 1);

    int dim() const { return static_cast<int>(comps_.size()); }
    const Net& rep() const;              // scalar shorthand (dim == 1)
    const Net& component(int i) const;   // 0-based
    const AlgebraSpec& spec() const { return spec_; }

    // The moderateness verdict recorded at construction (or inherited through
    // ring closure for derived values).
    const Verdict& moderationCertificate() const { return cert_; }

    std::string describe() const;

private:
    GenNumber(std::vector<Net> comps, AlgebraSpec spec, Verdict cert);

    std::vector<Net> comps_;
    AlgebraSpec spec_;
    Verdict cert_;

    friend GenNumber gnAdd(const GenNumber& a, const GenNumber& b);
    friend GenNumber gnMul(const GenNumber& a, const GenNumber& b);
    friend GenNumber gnNeg(const GenNumber& a);
    friend GenNumber barProject(const GenNumber& a, const AlgebraSpec& target);
};

// Representative-wise ring operations; the result's moderateness follows from
// the gauge closure axioms, so these never throw on certified inputs (only on
// spec or dimension mismatch).
GenNumber gnAdd(const GenNumber& a, const GenNumber& b);
GenNumber gnMul(const GenNumber& a, const GenNumber& b);
GenNumber gnNeg(const GenNumber& a);

// Equality in the quotient: the difference of representatives is Z-negligible
// in every component.
Verdict gnEq(const GenNumber& a, const GenNumber& b);

// Does a admit a B0-moderate representative? Requires R_M(B0) included in
// the growth ring of a's spec (ArgumentError otherwise); decided on the
// stored representative, which is legitimate because representatives differ
// by negligibles and those are B0-moderate under the precondition.
Verdict isBoundedBy(const GenNumber& a, const Gauge& B0);

// Reinterpret a under a smaller algebra spec (same representative). Requires
// the target's growth and negligibility families to embed into the source's
// and the representative to be bounded by target.B; throws ArgumentError when
// a precondition fails. Ring operations commute with this map.
GenNumber barProject(const GenNumber& a, const AlgebraSpec& target);

// A point-domain element: a net eventually confined to a fixed compact
// interval [lo, hi]. Construction verifies the confinement and keeps the
// verdict.
class CompactPoint {
public:
    static CompactPoint make(Net rep, double lo, double hi);

    const Net& rep() const { return rep_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Verdict& confinement() const { return confined_; }

private:
    CompactPoint(Net rep, double lo, double hi, Verdict confined);

    Net rep_;
    double lo_, hi_;
    Verdict confined_;
};

}  // namespace agcal
