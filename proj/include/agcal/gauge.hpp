#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agcal/asymptotics.hpp"
#include "agcal/net.hpp"
#include "agcal/verdict.hpp"

namespace agcal {

// An asymptotic gauge: a closed descriptor of a family of nets over one
// index set, against which moderateness and negligibility are measured.
// Four shapes cover every family the engine works with:
//
//   Powers      { base^a }           a over all positive reals or naturals
//   Generators  finite list of nets
//   ExpOf       { exp(H * b) }       H > 0 real, b a member of an inner gauge
//   Towers      { exp@k(1/eps) }     all iterated exponentials, k = 1, 2, ...
//
// Quantifiers over a family ("some member dominates x", "every member ...")
// become decidable queries on the descriptor. Checked factories verify the
// gauge axioms and throw ConstructionError on violation; unchecked factories
// build the bare descriptor so a failing family can still be handed to
// checkAxioms for diagnosis.
//
// Gauges are immutable; the positivity/order flags are computed once at
// construction, so instances are freely shareable across threads.
class Gauge {
public:
    enum class Family { Powers, Generators, ExpOf, Towers };
    enum class ExponentDomain { AllPositiveReals, Naturals };

    static Gauge powers(const RateExpr& base,
                        ExponentDomain dom = ExponentDomain::AllPositiveReals,
                        IndexSet index = IndexSet::halfOpenUnit());
    static Gauge generators(std::vector<RateExpr> members,
                            IndexSet index = IndexSet::halfOpenUnit());
    static Gauge expOf(const Gauge& inner);
    static Gauge towers(IndexSet index = IndexSet::halfOpenUnit());

    static Gauge uncheckedPowers(const RateExpr& base,
                                 ExponentDomain dom = ExponentDomain::AllPositiveReals,
                                 IndexSet index = IndexSet::halfOpenUnit());
    static Gauge uncheckedGenerators(std::vector<RateExpr> members,
                                     IndexSet index = IndexSet::halfOpenUnit());

    Family family() const { return family_; }
    ExponentDomain exponentDomain() const { return dom_; }
    const RateExpr& base() const;                  // Powers only
    const std::vector<RateExpr>& members() const;  // Generators, growth-ascending
    const Gauge& inner() const;                    // ExpOf only
    const IndexSet& index() const { return index_; }

    // All members eventually positive / pairwise growth-comparable.
    bool positive() const { return positive_; }
    bool totallyOrdered() const { return totallyOrdered_; }
    bool validated() const { return validated_; }

    // The j-th representative (j >= 1), growing with j: Powers -> base^j,
    // Generators -> j-th smallest (clamped to the largest), Towers ->
    // exp@j(1/eps), ExpOf -> exp(j * inner member j).
    Net memberAt(int j) const;
    RateExpr memberExprAt(int j) const;

    // Same family read at scale(eps); members then live over a composed
    // index set and all growth questions are decided through the scale.
    Gauge composedWith(const RateExpr& scale) const;

    std::string describe() const;

private:
    Gauge() = default;

    Family family_ = Family::Powers;
    ExponentDomain dom_ = ExponentDomain::AllPositiveReals;
    RateExpr base_;
    std::vector<RateExpr> members_;  // growth-ascending after construction
    std::shared_ptr<const Gauge> inner_;
    IndexSet index_;
    bool positive_ = false;
    bool totallyOrdered_ = false;
    bool validated_ = false;

    friend Gauge buildGauge(Gauge::Family family, const RateExpr& base,
                            Gauge::ExponentDomain dom, std::vector<RateExpr> members,
                            std::shared_ptr<const Gauge> inner, IndexSet index,
                            bool validate);
};

// Verdicts for the five gauge axioms:
//   (i)   a nonempty family of real nets over the index set
//   (ii)  some member tends to infinity in absolute value
//   (iii) the product of two members is dominated by a member
//   (iv)  any scalar multiple of a member is dominated by a member
//   (v)   |i| + |j| is dominated by an eventually positive member
struct AxiomReport {
    Verdict wellFormed;
    Verdict infiniteMember;
    Verdict productClosure;
    Verdict scalarClosure;
    Verdict absSumClosure;

    std::array<const Verdict*, 5> perAxiom() const {
        return {&wellFormed, &infiniteMember, &productClosure, &scalarClosure, &absSumClosure};
    }
    bool allHold() const;
    std::string summary() const;  // one line per axiom
};

AxiomReport checkAxioms(const Gauge& g);

// Is x dominated by some member of g (x lies in the moderate ring of g)?
// Exact for symbolic nets inside the fragment; member-probing and slope fits
// otherwise. Throws ArgumentError when x lives over a different index set.
Verdict isModerate(const Net& x, const Gauge& g);

// Is x below every reciprocal member of z (x is z-negligible)? z must be a
// positive gauge, else ArgumentError.
Verdict isNegligibleNum(const Net& x, const Gauge& z);

// A single net b whose powers reach every member of g, when one exists.
// When absent, the certificate names a candidate member together with a
// member escaping all of the candidate's powers.
struct PrincipalityResult {
    std::optional<RateExpr> generator;
    std::optional<RateExpr> candidate;
    std::optional<RateExpr> escaper;
    std::string note;

    bool principal() const { return generator.has_value(); }
};
PrincipalityResult principalGenerator(const Gauge& g);

// The exponential family over g: { exp(H * b) : H > 0, b in g }.
Gauge expGauge(const Gauge& g);

// Moderate-ring inclusion: every a-member is dominated by some b-member.
Verdict familyIncluded(const Gauge& a, const Gauge& b);

// Mutual moderate-ring inclusion.
Verdict equivalentGauges(const Gauge& a, const Gauge& b);

// Can Z-negligibility absorb B-growth (every b in B, z positive in Z admit a
// positive w in Z with b / w = O(1/z))? Decided through the equivalent
// moderate-ring inclusion of B in Z.
Verdict idealCompatible(const Gauge& B, const Gauge& Z);

// A pair of gauges (growth family B, negligibility family Z) with the
// inclusion of moderate rings certified at construction.
struct AlgebraSpec {
    Gauge B;
    Gauge Z;

    // Throws ConstructionError unless every B-member is Z-moderate.
    static AlgebraSpec make(Gauge growth, Gauge negligibility);
    std::string describe() const;
};

// Partial order on algebra specs: s1 precedes s2 when the B- and Z-families
// of s1 are both included in those of s2 (and each spec's own B-in-Z
// inclusion is certified).
Verdict algebraOrder(const AlgebraSpec& s1, const AlgebraSpec& s2);

}  // namespace agcal
