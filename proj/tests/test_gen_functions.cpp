#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "agcal/errors.hpp"
#include "agcal/gen_function.hpp"
#include "agcal/parser.hpp"

using namespace agcal;

namespace {

AlgebraSpec powerSpec() {
    auto b = Gauge::powers(rx::epsInv());
    return AlgebraSpec::make(b, b);
}

AlgebraSpec natSpec() {
    auto b = Gauge::powers(rx::epsInv(), Gauge::ExponentDomain::Naturals);
    return AlgebraSpec::make(b, b);
}

AlgebraSpec expSpec() {
    auto b = Gauge::expOf(Gauge::powers(rx::epsInv()));
    return AlgebraSpec::make(b, b);
}

bool mentions(const Verdict& v, const std::string& needle) {
    return v.note.find(needle) != std::string::npos;
}

// Central difference of a profile, for checking the symbolic derivatives.
double centralDiff(const SmoothProfile& f, double x) {
    const double h = 1e-6;
    return (f(x + h) - f(x - h)) / (2 * h);
}

SmoothFamily expDecayFamily() {
    // u_eps(t) = e^{-t/eps}, as a kernel: exp profile read at -t/eps.
    return SmoothFamily::scaledKernel(SmoothProfile::expFn(), rx::neg(rx::epsInv()), rx::lit(1),
                                      0.0);
}

}  // namespace

TEST_CASE("profile derivatives match finite differences") {
    std::vector<SmoothProfile> ps = {
        SmoothProfile::poly({1.0, -2.0, 0.5, 3.0}),
        SmoothProfile::sine(),
        SmoothProfile::cosine(),
        SmoothProfile::expFn(),
        SmoothProfile::gauss(),
        SmoothProfile::gaussTimesPoly({0.0, 1.0, 2.0}),
        SmoothProfile::bump(),
    };
    for (const auto& p : ps) {
        SmoothProfile d1 = p.derivative();
        SmoothProfile d2 = d1.derivative();  // second order stays in the class
        for (double x : {-0.9, -0.4, 0.0, 0.3, 0.7}) {
            CHECK(d1(x) == doctest::Approx(centralDiff(p, x)).epsilon(1e-5));
            CHECK(d2(x) == doctest::Approx(centralDiff(d1, x)).epsilon(1e-5));
        }
    }
}

TEST_CASE("bump profile is flat outside its support") {
    auto b = SmoothProfile::bump();
    CHECK(b(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(b(1.0) == 0.0);
    CHECK(b(-1.2) == 0.0);
    auto d3 = b.derivative().derivative().derivative();
    CHECK(d3(1.0) == 0.0);
    CHECK(std::isfinite(d3(0.999)));
}

TEST_CASE("profile maxima are located precisely") {
    // sin increases on [0, 1], so the maximum sits at the right endpoint.
    CHECK(SmoothProfile::sine().maxAbsOn(0.0, 1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-10));
    // |d/dx e^{-x^2}| = |2x| e^{-x^2} peaks at x = 1/sqrt(2).
    double expect = std::sqrt(2.0) * std::exp(-0.5);
    CHECK(SmoothProfile::gauss().derivative().maxAbsOn(-2.0, 2.0) ==
          doctest::Approx(expect).epsilon(1e-10));
    CHECK(SmoothProfile::poly({0.0, 0.0, 1.0}).maxAbsOn(-3.0, 2.0) == doctest::Approx(9.0));
}

TEST_CASE("separable sup-norm is the exact coefficient-weighted sum") {
    auto fam = SmoothFamily::separable({{parse("eps^-1"), SmoothProfile::sine()}});
    Net s = fam.supNorm(0.0, 1.0, 0);
    CHECK(s.isSymbolic());
    CHECK(s.at(0.1) == doctest::Approx(10.0 * std::sin(1.0)).epsilon(1e-12));
    CHECK(s.at(0.01) == doctest::Approx(100.0 * std::sin(1.0)).epsilon(1e-12));

    auto two = SmoothFamily::separable({{parse("eps^-1"), SmoothProfile::sine()},
                                        {parse("3"), SmoothProfile::poly({0.0, 1.0})}});
    Net s2 = two.supNorm(0.0, 1.0, 0);
    CHECK(s2.at(0.1) == doctest::Approx(10.0 * std::sin(1.0) + 3.0).epsilon(1e-12));
}

TEST_CASE("mollifier kernel sup-norm scales by the inner rate per derivative") {
    auto moll = SmoothFamily::scaledKernel(SmoothProfile::bump(), parse("eps^-1"), parse("eps^-1"),
                                           0.0);
    double peak = SmoothProfile::bump().derivative().maxAbsOn(-1.0, 1.0);
    Net s = moll.supNorm(-1.0, 1.0, 1);
    CHECK(s.isSymbolic());
    CHECK(s.at(0.1) == doctest::Approx(100.0 * peak).epsilon(1e-12));
    // d/dx of the family shifts the order by one: same net.
    Net viaDeriv = moll.derivative().supNorm(-1.0, 1.0, 0);
    CHECK(viaDeriv.at(0.05) == doctest::Approx(s.at(0.05)).epsilon(1e-12));
}

TEST_CASE("growing exponential family escapes power gauges but not their exponentials") {
    auto fam = expDecayFamily();
    Net s = fam.supNorm(-1.0, 1.0, 0);
    CHECK(s.isSymbolic());
    CHECK(s.at(0.01) == doctest::Approx(std::exp(100.0)).epsilon(1e-9));

    auto inPowers = GenFunction::make(fam, powerSpec(), -1.5, 1.5, /*allowUncertified=*/true);
    Verdict vs = isModerateFn(inPowers);
    CHECK(vs.fails());
    CHECK(vs.mode == Mode::Exact);
    CHECK(mentions(vs, "outruns every power"));

    auto inExp = GenFunction::make(fam, expSpec(), -1.5, 1.5);
    Verdict ve = isModerateFn(inExp);
    CHECK(ve.holds());
    CHECK(ve.mode == Mode::Exact);
    CHECK(inExp.moderationCertificate().holds());

    CHECK_THROWS_AS(GenFunction::make(fam, powerSpec(), -1.5, 1.5), ConstructionError);
}

TEST_CASE("bounded families certify in every gauge") {
    for (auto spec : {powerSpec(), natSpec(), expSpec()}) {
        auto u = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), spec, -2,
                                   2);
        Verdict v = isModerateFn(u);
        CHECK(v.holds());
        CHECK(v.mode == Mode::Exact);
    }
}

TEST_CASE("polynomially small families fail negligibility at the first losing power") {
    auto u = GenFunction::make(
        SmoothFamily::separable({{parse("eps^5"), SmoothProfile::poly({0.0, 0.0, 1.0})}}),
        natSpec(), -2, 2, /*allowUncertified=*/false);
    Verdict v = isNegligibleFn(u);
    CHECK(v.fails());
    CHECK(v.mode == Mode::Exact);
    CHECK(mentions(v, "(eps^-1)^-6"));

    Verdict upTo5 = isNegligibleFn(u, defaultBudget(u).windows, 0, 5);
    CHECK(upTo5.holds());
    CHECK(upTo5.mode == Mode::Exact);
}

TEST_CASE("exponentially small coefficients are negligible to full depth") {
    auto u = GenFunction::make(
        SmoothFamily::separable({{parse("exp(-eps^-1)"), SmoothProfile::sine()}}), natSpec(), -2,
        2);
    Verdict v = isNegligibleFn(u);
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
    CHECK(mentions(v, "m=8"));
    CHECK(mentions(v, "derivative order 4"));
}

TEST_CASE("point values compose symbolically inside the fragment") {
    auto u = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::poly({0.0, 0.0, 1.0})),
                               natSpec(), -2, 2);
    auto x = CompactPoint::make(Net::symbolic(rx::eps()), 0.0, 1.0);
    GenNumber pv = pointValue(u, x);
    CHECK(pv.rep().isSymbolic());
    Verdict eq = gnEq(pv, GenNumber::make(Net::symbolic(parse("eps^2")), natSpec()));
    CHECK(eq.holds());
    CHECK(eq.mode == Mode::Exact);
}

TEST_CASE("decaying exponential at a confined point is negligible") {
    auto u = GenFunction::make(expDecayFamily(), natSpec(), -1.5, 1.5, /*allowUncertified=*/true);
    auto one = CompactPoint::make(Net::symbolic(rx::lit(1)), 0.9, 1.1);
    GenNumber pv = pointValue(u, one);
    CHECK(pv.rep().isSymbolic());
    CHECK(pv.rep().describe().find("exp(-eps^-1)") != std::string::npos);
    Verdict v = isNegligibleNum(pv.rep(), natSpec().Z);
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
}

TEST_CASE("point values fall back to honest evaluation outside the fragment") {
    auto u = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), natSpec(), -2,
                               2);
    auto x = CompactPoint::make(Net::symbolic(rx::add(rx::lit(Rational(1, 2)), parse("eps^2"))),
                                0.4, 0.8);
    GenNumber pv = pointValue(u, x);
    CHECK_FALSE(pv.rep().isSymbolic());
    CHECK(pv.rep().at(0.1) == doctest::Approx(std::sin(0.51)).epsilon(1e-12));
    CHECK(pv.moderationCertificate().holds());
}

TEST_CASE("point confinement must sit inside the domain") {
    auto u = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), natSpec(), 0,
                               1);
    auto x = CompactPoint::make(Net::symbolic(rx::add(rx::lit(1), parse("eps"))), 1.0, 1.2);
    CHECK_THROWS_AS(pointValue(u, x), ArgumentError);
}

TEST_CASE("support of an embedded spike localizes to resolution") {
    auto u = GenFunction::make(
        SmoothFamily::scaledKernel(SmoothProfile::bump(), parse("eps^-1"), parse("eps^-1"), 0.5),
        natSpec(), 0, 1);
    auto segs = supportEstimate(u, 0.05);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].lo == doctest::Approx(0.45).epsilon(1e-4));
    CHECK(segs[0].hi == doctest::Approx(0.55).epsilon(1e-4));
    CHECK(segs[0].lo <= 0.5);
    CHECK(segs[0].hi >= 0.5);
    CHECK(segs[0].hi - segs[0].lo <= 2 * 0.05 + 1e-9);
}

TEST_CASE("support of zero is empty and of a unit constant is everything") {
    auto z = GenFunction::make(SmoothFamily::zero(), natSpec(), 0, 1);
    CHECK(supportEstimate(z, 0.05).empty());

    auto one = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::poly({1.0})),
                                 natSpec(), 0, 1);
    auto segs = supportEstimate(one, 0.05);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].hi - segs[0].lo > 0.99);

    CHECK_THROWS_AS(supportEstimate(z, 0.0), ArgumentError);
}

TEST_CASE("sum and product of separable families stay separable and certified") {
    auto spec = natSpec();
    auto a = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::poly({0.0, 0.0, 1.0})),
                               spec, -2, 2);
    auto b = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::poly({0.0, 1.0})),
                               spec, -2, 2);
    auto sum = gfAdd(a, b);
    CHECK(sum.family().form() == SmoothFamily::Form::SeparableSum);
    CHECK(sum.moderationCertificate().holds());
    CHECK(sum.eval(0.1, 0.5) == doctest::Approx(0.25 + 0.5));

    auto prod = gfMul(a, b);
    CHECK(prod.family().form() == SmoothFamily::Form::SeparableSum);
    CHECK(prod.family().describe().find("poly[0, 0, 0, 1]") != std::string::npos);
    CHECK(prod.eval(0.1, 0.5) == doctest::Approx(0.125));
}

TEST_CASE("products outside the closed forms degrade to a certified black box") {
    auto spec = natSpec();
    auto s = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), spec, -2, 2);
    auto p = gfMul(s, s);
    CHECK(p.family().form() == SmoothFamily::Form::BlackBox);
    CHECK(p.eval(0.1, 0.7) == doctest::Approx(std::sin(0.7) * std::sin(0.7)));
    Verdict v = isModerateFn(p, defaultBudget(p).windows, 1);
    CHECK(v.holds());
    CHECK(v.mode == Mode::Numeric);  // black boxes never claim certainty
}

TEST_CASE("negligible times moderate is negligible") {
    auto spec = natSpec();
    auto small = GenFunction::make(
        SmoothFamily::separable({{parse("exp(-eps^-1)"), SmoothProfile::sine()}}), spec, -2, 2);
    // Constant-profile factor folds exactly into the coefficients.
    auto big = GenFunction::make(
        SmoothFamily::separable({{parse("eps^-3"), SmoothProfile::poly({2.0})}}), spec, -2, 2);
    auto prod = gfMul(small, big);
    CHECK(prod.family().form() == SmoothFamily::Form::SeparableSum);
    Verdict v = isNegligibleFn(prod);
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);

    // A genuinely mixed product goes through the black box but stays small.
    auto mixed = gfMul(small, GenFunction::make(
                                  SmoothFamily::constantProfile(SmoothProfile::cosine()), spec,
                                  -2, 2));
    Verdict vm = isNegligibleFn(mixed, defaultBudget(mixed).windows, 0, 4);
    CHECK(vm.holds());
}

TEST_CASE("derivatives burn black-box budget and eventually refuse") {
    auto bb = SmoothFamily::blackBox(
        [](double eps, double x) { return std::sin(x) / (1.0 + eps); }, 2, "probe");
    Net s = bb.supNorm(-1.0, 1.0, 2);
    CHECK_FALSE(s.isSymbolic());
    CHECK_THROWS_AS(bb.supNorm(-1.0, 1.0, 3), CapabilityError);
    CHECK_THROWS_AS(bb.derivative().derivative().derivative(), CapabilityError);

    auto u = GenFunction::make(bb, natSpec(), -2, 2);
    Verdict v = isModerateFn(u);  // default budget clamps to the box's limit
    CHECK(v.holds());
    CHECK(v.mode == Mode::Numeric);
    CHECK_THROWS_AS(isModerateFn(u, defaultBudget(u).windows, 3), CapabilityError);
}

TEST_CASE("black-box sup-norms track the true supremum") {
    auto bb = SmoothFamily::blackBox(
        [](double eps, double x) { return std::sin(x) / (1.0 + eps); }, 0, "probe");
    Net s = bb.supNorm(-1.0, 1.0, 0);
    double e = 0.1 * std::pow(0.7, 4);  // a point of the sampling grid
    CHECK(s.at(e) == doctest::Approx(std::sin(1.0) / (1.0 + e)).epsilon(1e-4));
}

TEST_CASE("operands must share algebra and domain") {
    auto a = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), natSpec(), -2,
                               2);
    auto b = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), powerSpec(),
                               -2, 2);
    auto c = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), natSpec(), -1,
                               2);
    CHECK_THROWS_AS(gfAdd(a, b), ArgumentError);
    CHECK_THROWS_AS(gfMul(a, c), ArgumentError);
}

TEST_CASE("restriction needs a nonempty subinterval") {
    auto u = GenFunction::make(
        SmoothFamily::scaledKernel(SmoothProfile::bump(), parse("eps^-1"), parse("eps^-1"), 0.5),
        natSpec(), 0, 1);
    auto r = gfRestrict(u, 0.6, 1.0);
    CHECK(r.domainLo() == 0.6);
    // Away from the spike the restriction is negligible.
    Verdict v = isNegligibleFn(r, {{0.7, 0.9}}, 0, 4);
    CHECK(v.holds());
    CHECK_THROWS_AS(gfRestrict(u, -0.5, 0.5), ArgumentError);
    CHECK_THROWS_AS(gfRestrict(u, 0.8, 0.2), ArgumentError);
}

TEST_CASE("membership verdicts agree across equivalent gauges") {
    // eps^-1 and eps^-2 power families are equivalent; statuses must match.
    auto b1 = Gauge::powers(rx::epsInv());
    auto b2 = Gauge::powers(parse("eps^-2"));
    REQUIRE(equivalentGauges(b1, b2).holds());
    auto s1 = AlgebraSpec::make(b1, b1);
    auto s2 = AlgebraSpec::make(b2, b2);

    auto fam = SmoothFamily::separable({{parse("eps^-1"), SmoothProfile::sine()}});
    auto small = SmoothFamily::separable({{parse("eps^5"), SmoothProfile::poly({0.0, 0.0, 1.0})}});
    for (const auto& f : {fam, small}) {
        auto u1 = GenFunction::make(f, s1, -2, 2);
        auto u2 = GenFunction::make(f, s2, -2, 2);
        CHECK(isModerateFn(u1).status == isModerateFn(u2).status);
        CHECK(isNegligibleFn(u1).status == isNegligibleFn(u2).status);
    }
}

TEST_CASE("separable sup-norm soundly bounds the true supremum") {
    auto u = SmoothFamily::separable({{parse("eps^-1"), SmoothProfile::sine()},
                                      {parse("2"), SmoothProfile::cosine()},
                                      {parse("eps"), SmoothProfile::poly({0.0, 0.0, 1.0})}});
    Net s = u.supNorm(-1.0, 1.0, 0);
    for (double eps : {0.3, 0.1, 0.02}) {
        double actual = 0.0;
        for (int i = 0; i <= 200; ++i) {
            double x = -1.0 + 2.0 * i / 200;
            actual = std::max(actual, std::abs(u.eval(eps, x)));
        }
        CHECK(actual <= s.at(eps) + 1e-12);
    }
    // And subadditivity against the split families.
    auto a = SmoothFamily::separable({{parse("eps^-1"), SmoothProfile::sine()}});
    auto b = SmoothFamily::separable({{parse("2"), SmoothProfile::cosine()},
                                      {parse("eps"), SmoothProfile::poly({0.0, 0.0, 1.0})}});
    for (double eps : {0.3, 0.1, 0.02})
        CHECK(s.at(eps) <= a.supNorm(-1, 1, 0).at(eps) + b.supNorm(-1, 1, 0).at(eps) + 1e-12);
}

TEST_CASE("derivative closure keeps moderateness across random separable families") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> powDist(-6, 6);
    std::uniform_int_distribution<int> profDist(0, 3);
    auto spec = powerSpec();
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<SmoothFamily::Term> terms;
        for (int t = 0; t < 2; ++t) {
            SmoothProfile p = SmoothProfile::sine();
            switch (profDist(rng)) {
                case 0: p = SmoothProfile::sine(); break;
                case 1: p = SmoothProfile::cosine(); break;
                case 2: p = SmoothProfile::gauss(); break;
                case 3: p = SmoothProfile::poly({1.0, -1.0, 2.0}); break;
            }
            terms.push_back({rx::pow(rx::eps(), Rational(powDist(rng))), p});
        }
        auto u = GenFunction::make(SmoothFamily::separable(terms), spec, -2, 2);
        CHECK(u.moderationCertificate().holds());
        auto du = gfDeriv(u);
        CHECK(isModerateFn(du).holds());
    }
}

TEST_CASE("window validation rejects escapes from the domain") {
    auto u = GenFunction::make(SmoothFamily::constantProfile(SmoothProfile::sine()), natSpec(), 0,
                               1);
    CHECK_THROWS_AS(isModerateFn(u, {{-0.5, 0.5}}, 0), ArgumentError);
    CHECK_THROWS_AS(isModerateFn(u, {}, 0), ArgumentError);
    CHECK_THROWS_AS(isModerateFn(u, {{0.2, 0.8}}, -1), ArgumentError);
    CHECK_THROWS_AS(isNegligibleFn(u, {{0.2, 0.8}}, 0, 0), ArgumentError);
}
