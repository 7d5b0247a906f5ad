#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "agcal/gauge.hpp"
#include "agcal/parser.hpp"

using namespace agcal;

namespace {

Net sym(const std::string& text) { return Net::symbolic(text); }

bool mentions(const Verdict& v, const std::string& token) {
    return v.note.find(token) != std::string::npos;
}

// A Holds witness must actually certify the bound on a fine grid below eps0.
void checkWitness(const Net& x, const Net& y, const Verdict& v) {
    REQUIRE(v.holds());
    REQUIRE(v.witness.has_value());
    const double h = v.witness->boundConstant;
    const double e0 = v.witness->eps0;
    double e = e0;
    for (int k = 0; k < 60; ++k, e *= 0.82) {
        double vx, vy;
        try {
            vx = std::fabs(x.at(e));
            vy = std::fabs(y.at(e));
        } catch (const OverflowSignal&) {
            break;
        } catch (const NumericError&) {
            continue;
        }
        CAPTURE(e);
        CHECK(vx <= h * vy * (1 + 1e-9) + 1e-300);
    }
}

Gauge powerScale() { return Gauge::powers(rx::epsInv()); }
Gauge natScale() { return Gauge::powers(rx::epsInv(), Gauge::ExponentDomain::Naturals); }
Gauge expScale() { return Gauge::expOf(powerScale()); }

}  // namespace

// ---------------------------------------------------------------------------
// Axioms
// ---------------------------------------------------------------------------

TEST_CASE("the model families pass every gauge axiom") {
    const Gauge families[] = {powerScale(), natScale(), Gauge::towers(),
                              Gauge::powers(rx::hyper(Rational(1))), expScale()};
    for (const Gauge& g : families) {
        CAPTURE(g.describe());
        const AxiomReport r = checkAxioms(g);
        CHECK(r.allHold());
        CHECK(g.validated());
        CHECK(g.positive());
        CHECK(g.totallyOrdered());
        // The closure axioms are decided symbolically for these shapes.
        CHECK(r.productClosure.mode == Mode::Exact);
        CHECK(r.scalarClosure.mode == Mode::Exact);
        CHECK(r.absSumClosure.mode == Mode::Exact);
    }
}

TEST_CASE("a bare generator list fails product closure with the offending pair") {
    const Gauge g = Gauge::uncheckedGenerators(std::vector<RateExpr>{rx::epsInv()});
    CHECK_FALSE(g.validated());
    const AxiomReport r = checkAxioms(g);
    CHECK(r.wellFormed.holds());
    CHECK(r.infiniteMember.holds());
    CHECK(r.scalarClosure.holds());
    CHECK(r.absSumClosure.holds());
    REQUIRE(r.productClosure.fails());
    CHECK(r.productClosure.mode == Mode::Exact);
    CHECK(mentions(r.productClosure, "(eps^-1, eps^-1)"));
    CHECK(mentions(r.productClosure, "eps^-1 * eps^-1"));
    REQUIRE_FALSE(r.productClosure.counterexample.empty());
    CHECK_FALSE(r.allHold());
    CHECK(r.summary().find("product closure: fails") != std::string::npos);

    // The checked factory refuses the same family outright.
    CHECK_THROWS_AS(Gauge::generators(std::vector<RateExpr>{rx::epsInv()}), ConstructionError);
}

TEST_CASE("an empty generator list is rejected as not well-formed") {
    const Gauge g = Gauge::uncheckedGenerators({});
    const AxiomReport r = checkAxioms(g);
    CHECK(r.wellFormed.fails());
    CHECK(mentions(r.wellFormed, "empty"));
}

TEST_CASE("checked constructors reject degenerate families") {
    CHECK_THROWS_AS(Gauge::powers(rx::eps()), ConstructionError);          // tends to 0
    CHECK_THROWS_AS(Gauge::powers(rx::lit(3)), ConstructionError);         // bounded
    CHECK_THROWS_AS(Gauge::powers(rx::neg(rx::epsInv())), ConstructionError);  // -inf, not +inf
    // Exponentials of super-exponential members leave the decidable language.
    CHECK_THROWS_AS(Gauge::expOf(Gauge::powers(rx::hyper(Rational(1)))), ConstructionError);
}

// ---------------------------------------------------------------------------
// Moderateness
// ---------------------------------------------------------------------------

TEST_CASE("power families certify moderateness with an explicit exponent") {
    const Gauge bs = powerScale();

    const Net x = sym("eps^-7 * log(eps^-1)");
    const Verdict v = isModerate(x, bs);
    REQUIRE(v.holds());
    CHECK(v.mode == Mode::Exact);
    CHECK(mentions(v, "witness member eps^-8"));
    checkWitness(x, sym("eps^-8"), v);

    // The exponent is not inflated when the class is exact.
    const Verdict w = isModerate(sym("eps^-2"), bs);
    REQUIRE(w.holds());
    CHECK(mentions(w, "witness member eps^-2"));

    const Verdict f = isModerate(sym("exp(eps^-1)"), bs);
    REQUIRE(f.fails());
    CHECK(f.mode == Mode::Exact);
    REQUIRE(f.counterexample.size() >= 3);
    for (std::size_t i = 1; i < f.counterexample.size(); ++i)
        CHECK(f.counterexample[i] < f.counterexample[i - 1]);
}

TEST_CASE("exponential families pick integer multiples of inner members") {
    const Gauge ebs = expScale();

    const Net x = sym("exp(eps^-1) * eps^-3");
    const Verdict v = isModerate(x, ebs);
    REQUIRE(v.holds());
    CHECK(v.mode == Mode::Exact);
    CHECK(mentions(v, "witness member exp(2 * eps^-1)"));
    checkWitness(x, sym("exp(2 * eps^-1)"), v);

    // Plain powers sit inside the exponential scale, fractional orders too.
    for (const char* t : {"eps^-1", "eps^(-5/2)", "eps^-19"})
        CHECK(isModerate(sym(t), ebs).holds());
    CHECK(isModerate(sym("exp(eps^-1) * eps^-5"), ebs).holds());
    CHECK(isModerate(sym("exp(3 * eps^-2)"), ebs).holds());

    // Genuinely super-exponential growth still escapes.
    CHECK(isModerate(Net::symbolic(rx::hyper(Rational(1))), ebs).fails());
}

TEST_CASE("tower families absorb iterated exponentials at the next level") {
    const Gauge tow = Gauge::towers();
    const Verdict v = isModerate(sym("exp(exp(eps^-1)) * eps^-1"), tow);
    REQUIRE(v.holds());
    CHECK(mentions(v, "exp@3(eps^-1)"));
    CHECK(isModerate(sym("eps^-40"), tow).holds());
    const Verdict f = isModerate(Net::symbolic(rx::hyper(Rational(1))), tow);
    REQUIRE(f.fails());
    CHECK(mentions(f, "iterated exponential"));
}

TEST_CASE("super-exponential bases measure by hyper-exponent ratio") {
    const Gauge hyp = Gauge::powers(rx::hyper(Rational(1)));
    const Verdict v = isModerate(Net::symbolic(rx::pow(rx::hyper(Rational(1)), Rational(5, 2))), hyp);
    REQUIRE(v.holds());
    CHECK(mentions(v, "hyper(1)^3"));
    CHECK(isModerate(sym("exp(eps^-5)"), hyp).holds());
}

TEST_CASE("moderateness demands a shared index set") {
    const Gauge bs = powerScale();
    CHECK_THROWS_AS(isModerate(Net::symbolic(rx::epsInv(), IndexSet::naturalsFrechet()), bs),
                    ArgumentError);
}

// ---------------------------------------------------------------------------
// Negligibility
// ---------------------------------------------------------------------------

TEST_CASE("exponential decay is negligible for every reciprocal power") {
    const Gauge ag = natScale();
    const Net x = sym("exp(-(eps^-1))");
    const Verdict v = isNegligibleNum(x, ag);
    REQUIRE(v.holds());
    CHECK(v.mode == Mode::Exact);
    checkWitness(x, sym("eps^3"), v);
    CHECK(isNegligibleNum(Net::zero(), ag).holds());
}

TEST_CASE("a fixed power is blocked at the next exponent") {
    const Gauge ag = natScale();
    const Verdict v = isNegligibleNum(sym("eps^10"), ag);
    REQUIRE(v.fails());
    CHECK(v.mode == Mode::Exact);
    CHECK(mentions(v, "exponent 11"));
    CHECK(mentions(v, "eps^11"));
    REQUIRE(v.counterexample.size() >= 3);
    for (std::size_t i = 1; i < v.counterexample.size(); ++i)
        CHECK(v.counterexample[i] < v.counterexample[i - 1]);
}

TEST_CASE("no power is negligible against an exponential scale") {
    const Gauge ebs = expScale();
    for (const char* t : {"eps", "eps^3", "eps^7"}) {
        CAPTURE(t);
        const Verdict v = isNegligibleNum(sym(t), ebs);
        REQUIRE(v.fails());
        CHECK(v.mode == Mode::Exact);
        CHECK(mentions(v, "exp(eps^-1)"));
    }
    // Even exponential decay fails when its exponent does not outrun the
    // whole inner family.
    CHECK(isNegligibleNum(sym("exp(-(eps^-1)) * eps"), ebs).fails());
    CHECK(isNegligibleNum(sym("exp(-(eps^-2))"), ebs).fails());
    // Super-exponential decay passes.
    CHECK(isNegligibleNum(Net::symbolic(rx::pow(rx::hyper(Rational(1)), Rational(-1))), ebs)
              .holds());
}

TEST_CASE("tower and hyper scales leave almost nothing negligible") {
    CHECK(isNegligibleNum(sym("eps^10"), Gauge::towers()).fails());
    const Verdict v = isNegligibleNum(sym("exp(-exp(eps^-1))"), Gauge::towers());
    REQUIRE(v.fails());
    CHECK(mentions(v, "tower level 3"));
    const Gauge hyp = Gauge::powers(rx::hyper(Rational(1)));
    CHECK(isNegligibleNum(sym("eps^10"), hyp).fails());
    // Even a reciprocal hyper power is blocked one level further down:
    // hyper(-2) / hyper(-3) is hyper(1), which still grows.
    const Verdict h = isNegligibleNum(
        Net::symbolic(rx::pow(rx::hyper(Rational(1)), Rational(-2))), hyp);
    REQUIRE(h.fails());
    CHECK(mentions(h, "exponent 3"));
}

TEST_CASE("negligibility requires a positive gauge") {
    const Gauge neg = Gauge::uncheckedPowers(rx::neg(rx::epsInv()));
    CHECK_FALSE(neg.positive());
    CHECK_THROWS_AS(isNegligibleNum(sym("eps"), neg), ArgumentError);
}

// ---------------------------------------------------------------------------
// Principality
// ---------------------------------------------------------------------------

TEST_CASE("power families are principal with their base") {
    const PrincipalityResult r = principalGenerator(powerScale());
    REQUIRE(r.principal());
    CHECK(r.generator->str() == "eps^-1");
}

TEST_CASE("exponential families are not principal and name an escaper") {
    const PrincipalityResult r = principalGenerator(expScale());
    CHECK_FALSE(r.principal());
    REQUIRE(r.candidate.has_value());
    REQUIRE(r.escaper.has_value());
    CHECK(r.candidate->str() == "exp(eps^-1)");
    CHECK(r.escaper->str() == "exp(eps^-2)");

    // The certificate is honest: the escaper beats every tried power of the
    // candidate, while the candidate's powers stay below the escaper.
    const Net esc = Net::symbolic(*r.escaper);
    for (int k = 1; k <= 5; ++k) {
        const Net candPow = Net::symbolic(rx::pow(*r.candidate, Rational(k)));
        CHECK(bigO(candPow, esc).holds());
        CHECK(bigO(esc, candPow).fails());
    }
}

TEST_CASE("generator lists search for a member dominating the others' powers") {
    const Gauge g = Gauge::uncheckedGenerators(
        std::vector<RateExpr>{parse("eps^-1"), parse("eps^-3")});
    const PrincipalityResult r = principalGenerator(g);
    REQUIRE(r.principal());
    CHECK(r.generator->str() == "eps^-3");

    // A member beyond all powers of the top blocks principality.
    const Gauge h = Gauge::uncheckedGenerators(
        std::vector<RateExpr>{parse("eps^-2"), parse("exp(eps^-1)")});
    const PrincipalityResult s = principalGenerator(h);
    REQUIRE(s.principal());
    CHECK(s.generator->str() == "exp(eps^-1)");
}

TEST_CASE("towers are not principal: the next level escapes") {
    const PrincipalityResult r = principalGenerator(Gauge::towers());
    CHECK_FALSE(r.principal());
    REQUIRE(r.candidate.has_value());
    REQUIRE(r.escaper.has_value());
    CHECK(r.candidate->str() == "exp(eps^-1)");
    CHECK(r.escaper->str() == "exp@2(eps^-1)");
    for (int k : {1, 3, 9})
        CHECK(bigO(Net::symbolic(*r.escaper), Net::symbolic(rx::pow(*r.candidate, Rational(k))))
                  .fails());
}

TEST_CASE("principal generators reach sampled members within exponent 20") {
    const Gauge gs[] = {powerScale(),
                        Gauge::uncheckedGenerators(std::vector<RateExpr>{
                            parse("eps^-1"), parse("eps^-3"), parse("eps^-2 * log(eps^-1)")})};
    for (const Gauge& g : gs) {
        const PrincipalityResult r = principalGenerator(g);
        REQUIRE(r.principal());
        const RateExpr b = *r.generator;
        for (int j = 1; j <= 5; ++j) {
            bool reached = false;
            for (int m = 1; m <= 20 && !reached; ++m)
                reached = bigO(g.memberAt(j), Net::symbolic(rx::pow(b, Rational(m)))).holds();
            CAPTURE(g.describe());
            CAPTURE(j);
            CHECK(reached);
        }
    }
}

// ---------------------------------------------------------------------------
// Inclusion, equivalence, ordering
// ---------------------------------------------------------------------------

TEST_CASE("rescaled power families are pairwise equivalent") {
    const Gauge a = powerScale();                // real exponents of 1/eps
    const Gauge b = Gauge::powers(parse("eps^-2"));  // even exponents
    const Gauge c = natScale();                  // natural exponents
    const Gauge* gs[] = {&a, &b, &c};
    for (const Gauge* x : gs)
        for (const Gauge* y : gs) {
            CAPTURE(x->describe());
            CAPTURE(y->describe());
            const Verdict v = equivalentGauges(*x, *y);
            CHECK(v.holds());
            CHECK(v.mode == Mode::Exact);
        }
}

TEST_CASE("the exponential scale strictly contains the power scale") {
    const Gauge bs = powerScale();
    const Gauge ebs = expScale();
    CHECK(familyIncluded(bs, ebs).holds());
    const Verdict back = familyIncluded(ebs, bs);
    REQUIRE(back.fails());
    CHECK(back.mode == Mode::Exact);
    CHECK(equivalentGauges(bs, ebs).fails());
}

TEST_CASE("towers sit strictly below the hyper-power scale") {
    const Gauge tow = Gauge::towers();
    const Gauge hyp = Gauge::powers(rx::hyper(Rational(1)));
    CHECK(familyIncluded(tow, hyp).holds());
    CHECK(familyIncluded(hyp, tow).fails());
    // Exponentials of powers stay inside the towers, but not conversely.
    CHECK(familyIncluded(expScale(), tow).holds());
    CHECK(familyIncluded(tow, expScale()).fails());
}

TEST_CASE("fixed exponential bases embed into the exponential closure") {
    const Gauge target = Gauge::expOf(natScale());
    for (int k = 1; k <= 3; ++k) {
        const Gauge g = Gauge::powers(parse("exp(eps^-" + std::to_string(k) + ")"),
                                      Gauge::ExponentDomain::Naturals);
        CAPTURE(k);
        CHECK(familyIncluded(g, target).holds());
    }
}

TEST_CASE("ideal compatibility follows the moderate-ring inclusion") {
    const Gauge bs = powerScale();
    const Gauge ebs = expScale();
    CHECK(idealCompatible(bs, bs).holds());
    CHECK(idealCompatible(bs, ebs).holds());
    const Verdict v = idealCompatible(ebs, bs);
    REQUIRE(v.fails());
    CHECK(mentions(v, "absorption witness"));
}

TEST_CASE("algebra specs certify and order covariantly") {
    const AlgebraSpec s1 = AlgebraSpec::make(powerScale(), powerScale());
    const AlgebraSpec s2 = AlgebraSpec::make(expScale(), expScale());
    CHECK(s1.describe() == "(powers(eps^-1), powers(eps^-1))");

    CHECK(algebraOrder(s1, s1).holds());
    CHECK(algebraOrder(s1, s2).holds());
    CHECK(algebraOrder(s2, s1).fails());

    CHECK_THROWS_AS(AlgebraSpec::make(expScale(), powerScale()), ConstructionError);
}

// ---------------------------------------------------------------------------
// Members, composition, description
// ---------------------------------------------------------------------------

TEST_CASE("member access follows the documented shapes") {
    CHECK(powerScale().memberExprAt(3).str() == "eps^-3");
    CHECK(Gauge::towers().memberExprAt(2).str() == "exp@2(eps^-1)");
    CHECK(expScale().memberExprAt(1).str() == "exp(eps^-1)");
    CHECK(expScale().memberExprAt(2).str() == "exp(2 * eps^-2)");
    CHECK_THROWS_AS(powerScale().memberExprAt(0), ArgumentError);

    const Gauge g = Gauge::uncheckedGenerators(
        std::vector<RateExpr>{parse("eps^-3"), parse("eps^-1")});
    // Members come back growth-ascending and clamp at the top.
    CHECK(g.memberExprAt(1).str() == "eps^-1");
    CHECK(g.memberExprAt(2).str() == "eps^-3");
    CHECK(g.memberExprAt(9).str() == "eps^-3");
}

TEST_CASE("composition reads the family through a decaying scale") {
    const Gauge bs = powerScale();
    const Gauge cbs = bs.composedWith(parse("eps^2"));
    CHECK(cbs.describe() == "comp(powers(eps^-1), eps^2)");
    CHECK(cbs.memberAt(2).at(0.5) == doctest::Approx(16.0));  // (0.5^2)^-2

    const Net x = Net::symbolic(parse("eps^-3"), IndexSet::composed(parse("eps^2")));
    const Verdict v = isModerate(x, cbs);
    CHECK(v.holds());

    // Composition demands a scale that decreases to zero, and nets over a
    // different index set are refused.
    CHECK_THROWS_AS(bs.composedWith(parse("eps^-1")), ArgumentError);
    CHECK_THROWS_AS(isModerate(sym("eps^-3"), cbs), ArgumentError);
}

TEST_CASE("descriptions name the family shape") {
    CHECK(powerScale().describe() == "powers(eps^-1)");
    CHECK(natScale().describe() == "powers_nat(eps^-1)");
    CHECK(Gauge::towers().describe() == "towers()");
    CHECK(expScale().describe() == "expof(powers(eps^-1))");
    CHECK(Gauge::uncheckedGenerators(
              std::vector<RateExpr>{parse("eps^-1"), parse("eps^-3")})
              .describe() == "gens[eps^-1, eps^-3]");
}

// ---------------------------------------------------------------------------
// Ring-theoretic properties on random nets
// ---------------------------------------------------------------------------

TEST_CASE("moderate nets close under sum and product") {
    const Gauge bs = powerScale();
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> expo(0, 9), logExpo(-2, 2);
    for (int trial = 0; trial < 60; ++trial) {
        const RateExpr x = rx::mul(rx::epsPow(Rational(-expo(rng))),
                                   rx::pow(rx::logInvEps(), Rational(logExpo(rng))));
        const RateExpr y = rx::mul(rx::epsPow(Rational(-expo(rng))),
                                   rx::pow(rx::logInvEps(), Rational(logExpo(rng))));
        CAPTURE(x.str());
        CAPTURE(y.str());
        REQUIRE(isModerate(Net::symbolic(x), bs).holds());
        REQUIRE(isModerate(Net::symbolic(y), bs).holds());
        CHECK(isModerate(Net::symbolic(rx::mul(x, y)), bs).holds());
        CHECK(isModerate(Net::symbolic(rx::add(x, y)), bs).holds());
    }
}

TEST_CASE("negligible nets are in particular moderate") {
    const Gauge gs[] = {natScale(), expScale()};
    const char* nets[] = {"exp(-(eps^-1))", "eps * exp(-(eps^-2))"};
    for (const Gauge& g : gs)
        for (const char* t : nets) {
            CAPTURE(g.describe());
            CAPTURE(t);
            const Verdict n = isNegligibleNum(sym(t), g);
            if (n.holds()) CHECK(isModerate(sym(t), g).holds());
        }
    // And a direct witness: exponential decay is negligible and moderate.
    CHECK(isNegligibleNum(sym("exp(-(eps^-1))"), natScale()).holds());
    CHECK(isModerate(sym("exp(-(eps^-1))"), natScale()).holds());
}

TEST_CASE("equivalence acts as an equivalence relation on power families") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(1, 6), den(1, 3);
    std::vector<Gauge> gs;
    for (int i = 0; i < 4; ++i)
        gs.push_back(Gauge::powers(rx::epsPow(Rational(-num(rng), den(rng)))));
    for (const Gauge& g : gs) CHECK(equivalentGauges(g, g).holds());
    for (std::size_t i = 0; i < gs.size(); ++i)
        for (std::size_t j = i + 1; j < gs.size(); ++j) {
            const Verdict ij = equivalentGauges(gs[i], gs[j]);
            const Verdict ji = equivalentGauges(gs[j], gs[i]);
            CHECK(ij.holds() == ji.holds());  // symmetry
            CHECK(ij.holds());                // all powers of eps^-q are equivalent
        }
}
