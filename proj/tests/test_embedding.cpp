#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "agcal/asymptotics.hpp"
#include "agcal/embedding.hpp"
#include "agcal/errors.hpp"
#include "agcal/quadrature.hpp"

using namespace agcal;

namespace {

constexpr double kInvSqrtPi = 0.5641895835477563;

bool mentions(const Verdict& v, const std::string& needle) {
    return v.note.find(needle) != std::string::npos;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

AlgebraSpec natPowers(const RateExpr& b) {
    Gauge G = Gauge::powers(b, Gauge::ExponentDomain::Naturals);
    return AlgebraSpec::make(G, G);
}

// The probing grid matched to quadrature-backed families: stays above the
// instrument's noise floor.
NumericOptions shallowGrid() {
    NumericOptions opt;
    opt.grid = GridSpec{0.1, 0.82, 22};
    return opt;
}

double familyMass(const SmoothFamily& f, double eps, double lo, double hi) {
    return integrate([&](double x) { return f.eval(eps, x); }, lo, hi, {1e-12, 48});
}

}  // namespace

TEST_CASE("mollifier coefficients solve the Gaussian moment system") {
    Mollifier m0 = Mollifier::build(0);
    REQUIRE(m0.profile().mainPoly().size() == 1);
    CHECK(m0.profile().mainPoly()[0] == doctest::Approx(kInvSqrtPi).epsilon(1e-12));

    // M=2: (3/2 - x^2) / sqrt(pi)
    Mollifier m2 = Mollifier::build(2);
    const auto& p2 = m2.profile().mainPoly();
    REQUIRE(p2.size() == 3);
    CHECK(p2[0] == doctest::Approx(1.5 * kInvSqrtPi).epsilon(1e-12));
    CHECK(p2[1] == doctest::Approx(0.0));
    CHECK(p2[2] == doctest::Approx(-kInvSqrtPi).epsilon(1e-12));

    // M=4: (15/8 - 5/2 x^2 + 1/2 x^4) / sqrt(pi)
    Mollifier m4 = Mollifier::build(4);
    const auto& p4 = m4.profile().mainPoly();
    REQUIRE(p4.size() == 5);
    CHECK(p4[0] == doctest::Approx(1.875 * kInvSqrtPi).epsilon(1e-12));
    CHECK(p4[2] == doctest::Approx(-2.5 * kInvSqrtPi).epsilon(1e-12));
    CHECK(p4[4] == doctest::Approx(0.5 * kInvSqrtPi).epsilon(1e-12));
    CHECK(m4.conditionEstimate() < 100.0);
    CHECK(m4.valueAtZero() == doctest::Approx(p4[0]));
}

TEST_CASE("mollifier invariants: unit mass and vanishing moments to 1e-10") {
    for (int M : {0, 2, 3, 4, 8, 12}) {
        Mollifier m = Mollifier::build(M);
        CHECK(std::fabs(m.mass() - 1.0) < 1e-10);
        REQUIRE(static_cast<int>(m.moments().size()) == M);
        for (double mom : m.moments()) CHECK(std::fabs(mom) < 1e-10);
        CHECK(m.absMass() >= 1.0 - 1e-10);
    }
    // A mollifier with vanishing moments must go negative somewhere.
    CHECK(Mollifier::build(2).absMass() == doctest::Approx(1.1418316262804).epsilon(1e-9));
    CHECK_THROWS_AS(Mollifier::build(13), ArgumentError);
    CHECK_THROWS_AS(Mollifier::build(-1), ArgumentError);
}

TEST_CASE("model delta net: unit mass for every eps and delta-like action") {
    Mollifier m2 = Mollifier::build(2);
    SmoothFamily dn = modelDeltaNet(rx::epsInv(), m2);
    CHECK(contains(dn.describe(), "in=eps^-1"));
    CHECK(contains(dn.describe(), "out=eps^-1"));
    double prevGap = 1.0;
    for (double e : {0.5, 0.1, 0.02}) {
        CHECK(familyMass(dn, e, -26.0 * e, 26.0 * e) == doctest::Approx(1.0).epsilon(1e-10));
        double pair = integrate([&](double x) { return dn.eval(e, x) * std::cos(x); },
                                -26.0 * e, 26.0 * e, {1e-12, 48});
        double gap = std::fabs(pair - 1.0);  // cos(0) = 1
        CHECK(gap < prevGap);
        prevGap = gap;
    }
    CHECK(prevGap < 1e-7);
    CHECK_THROWS_AS(modelDeltaNet(rx::eps(), m2), ArgumentError);
    CHECK_THROWS_AS(modelDeltaNet(rx::lit(3), m2), ArgumentError);
}

TEST_CASE("embedded delta: closed form, exact certificate, symbolic point value") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    GenFunction u = embed(CompactDistribution::delta(0.0), b, m2, -2.0, 2.0);

    const Verdict& cert = u.moderationCertificate();
    CHECK(cert.holds());
    CHECK(cert.mode == Mode::Exact);

    // Value at x=0 is b_eps * rho(0).
    CHECK(u.eval(0.1, 0.0) == doctest::Approx(10.0 * m2.valueAtZero()).epsilon(1e-12));
    GenNumber v = pointValue(u, CompactPoint::make(Net::symbolic(rx::lit(0)), -0.1, 0.1));
    CHECK(v.rep().isSymbolic());
    CHECK(contains(v.rep().describe(), "eps^-1"));

    // Derivative of delta at a shifted location keeps the closed form with
    // the extra power of b.
    GenFunction u1 = embed(CompactDistribution::derivedDelta(1, 0.25), b, m2, -2.0, 2.0);
    CHECK(contains(u1.family().describe(), "out=eps^-2"));
    CHECK(contains(u1.family().describe(), "shift=0.25"));
    CHECK(u1.moderationCertificate().mode == Mode::Exact);

    // Support collapses onto the mass point at the requested resolution.
    auto sup = supportEstimate(u, 0.05);
    REQUIRE(sup.size() == 1);
    CHECK(sup.front().lo == doctest::Approx(-0.05).epsilon(1e-6));
    CHECK(sup.front().hi == doctest::Approx(0.05).epsilon(1e-6));

    CHECK_THROWS_AS(embed(CompactDistribution::delta(3.0), b, m2, -2.0, 2.0), ArgumentError);
}

TEST_CASE("polynomial densities embed exactly and agree with the constant embedding") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    SmoothProfile f = SmoothProfile::poly({1.0, 0.0, 1.0});  // 1 + x^2, degree <= M
    GenFunction u = embed(CompactDistribution::density(f, -1.5, 1.5), b, m2, -2.0, 2.0);
    CHECK(u.family().describe() == "sep[(1) * poly[1, 0, 1]]");

    SmoothFamily diff =
        famAdd(u.family(), scaleFamily(SmoothFamily::constantProfile(f), rx::lit(-1)));
    GenFunction du = GenFunction::make(diff, natPowers(b), -2.0, 2.0, true);
    Verdict neg = isNegligibleFn(du, {{-1.0, 1.0}}, 2, 2);
    CHECK(neg.holds());
    CHECK(neg.mode == Mode::Exact);

    // Degree above M picks up the b^{-j} Taylor corrections instead.
    Mollifier m0 = Mollifier::build(0);
    GenFunction q = embed(CompactDistribution::density(f, -1.5, 1.5), b, m0, -2.0, 2.0);
    REQUIRE(q.family().terms().size() == 2);  // f itself plus the j=2 correction
    double mu2 = 0.5;                         // second moment of gauss/sqrt(pi)
    CHECK(q.eval(0.1, 0.0) == doctest::Approx(1.0 + 0.01 * mu2 / 2.0 * 2.0).epsilon(1e-9));
}

TEST_CASE("smooth compact densities embed through quadrature and converge to sigma") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    SmoothProfile f = SmoothProfile::bump();
    GenFunction u = embed(CompactDistribution::density(f, -1.0, 1.0), b, m2, -2.0, 2.0);
    CHECK(u.moderationCertificate().holds());
    CHECK(u.moderationCertificate().mode == Mode::Numeric);
    CHECK(u.eval(0.05, 0.3) == doctest::Approx(f(0.3)).epsilon(1e-4));

    SmoothFamily diff =
        famAdd(u.family(), scaleFamily(SmoothFamily::constantProfile(f), rx::lit(-1)));
    GenFunction du = GenFunction::make(diff, natPowers(b), -2.0, 2.0, true);
    Verdict neg = isNegligibleFn(du, {{-0.9, 0.9}}, 0, 2, shallowGrid());
    CHECK(neg.holds());
    CHECK(mentions(neg, "up to m=2"));
}

TEST_CASE("embedding is linear across term lists") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    CompactDistribution w1 = CompactDistribution::delta(0.2);
    CompactDistribution w2 = CompactDistribution::derivedDelta(1, -0.3, 0.5);
    GenFunction sum = embed(w1.plus(w2), b, m2, -2.0, 2.0);
    GenFunction a = embed(w1, b, m2, -2.0, 2.0);
    GenFunction c = embed(w2, b, m2, -2.0, 2.0);
    double worst = 0.0;
    for (double e : {0.5, 0.1, 0.03})
        for (int i = 0; i <= 40; ++i) {
            double x = -1.5 + 3.0 * i / 40.0;
            worst = std::max(worst, std::fabs(sum.eval(e, x) - a.eval(e, x) - c.eval(e, x)));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("cancelled distributions embed negligibly and pair to zero") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    CompactDistribution z =
        CompactDistribution::delta(0.1).plus(CompactDistribution::delta(0.1, -1.0));
    GenFunction u = embed(z, b, m2, -2.0, 2.0);
    Verdict neg = isNegligibleFn(u, {{-1.0, 1.0}}, 0, 3, shallowGrid());
    CHECK(neg.holds());
    CHECK(std::fabs(z.pairWith(SmoothProfile::bump())) < 1e-13);
    CHECK(std::fabs(z.pairWith(SmoothProfile::bump().timesPoly({1.0, 2.0}))) < 1e-13);

    // A live delta is not negligible, and its pairings are not zero.
    GenFunction live = embed(CompactDistribution::delta(0.1), b, m2, -2.0, 2.0);
    CHECK(isNegligibleFn(live, {{-1.0, 1.0}}, 0, 3, shallowGrid()).fails());
    CHECK(std::fabs(CompactDistribution::delta(0.1).pairWith(SmoothProfile::bump())) > 0.1);
}

TEST_CASE("density support survives the embedding at the tested resolution") {
    Mollifier m2 = Mollifier::build(2);
    GenFunction u = embed(
        CompactDistribution::density(SmoothProfile::bump().timesPoly({4.0}), -1.0, 1.0),
        rx::epsInv(), m2, -3.0, 3.0);
    auto sup = supportEstimate(u, 0.4);
    REQUIRE(sup.size() == 1);
    CHECK(sup.front().lo == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(sup.front().hi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Taylor residual decays at the moment-order rate") {
    RateExpr b = rx::epsInv();
    SlopeFit sinFit = taylorResidualSlope(SmoothProfile::sine(), b, Mollifier::build(2), -1.0, 1.0);
    // Even mollifier: the order-3 term dies with the odd moments, so the
    // decay lands at M+2 = 4, comfortably past the generic M+1 floor.
    CHECK(sinFit.slope > 3.4);
    CHECK(sinFit.slope < 4.5);
    CHECK(sinFit.used >= 10);
    CHECK(sinFit.noiseLimited);

    SlopeFit gaussFit =
        taylorResidualSlope(SmoothProfile::gauss(), b, Mollifier::build(4), -1.0, 1.0);
    CHECK(gaussFit.slope > 4.5);
    CHECK(gaussFit.slope < 6.6);

    SlopeFit polyFit = taylorResidualSlope(SmoothProfile::poly({1.0, 2.0, -0.5}), b,
                                           Mollifier::build(2), -1.0, 1.0);
    double worst = 0.0;
    for (const auto& [eps, r] : polyFit.samples) worst = std::max(worst, r);
    CHECK(worst < 1e-12);
}

TEST_CASE("strict delta net: selection rule, unit mass, confined support") {
    RateExpr b = rx::epsInv();
    StrictDeltaReport rep = strictDeltaNet(b, 4);
    CHECK(rep.cap == 4);
    REQUIRE(static_cast<int>(rep.derivSup.size()) == rep.cap + 1);

    // The derivative bounds are monotone and grow steeply with the moment
    // order (frozen from the constructed bump polynomials).
    CHECK(rep.derivSup[0] == doctest::Approx(0.828569).epsilon(1e-4));
    CHECK(rep.derivSup[1] == doctest::Approx(1.798290).epsilon(1e-4));
    CHECK(rep.derivSup[2] == doctest::Approx(36.796674).epsilon(1e-4));
    CHECK(rep.derivSup[4] == doctest::Approx(117104.6).epsilon(1e-3));
    for (int m = 1; m <= rep.cap; ++m) CHECK(rep.derivSup[m] >= rep.derivSup[m - 1]);

    // Selection rule holds exactly as computed, and m_eps is nondecreasing
    // toward the limit.
    int prev = 0;
    for (const auto& row : rep.rows) {
        if (row.m > 0) CHECK(rep.derivSup[row.m] <= row.bound);
        if (row.m + 1 <= rep.cap) CHECK(row.bound < rep.derivSup[row.m + 1]);
        CHECK(row.m >= prev);
        prev = row.m;
    }
    CHECK(prev == rep.cap);  // deep in the net the cap is reached

    // The switching profile phi_{m(eps)}: unit mass to 1e-8 at every index,
    // support inside the closed unit ball.
    for (double e : {0.1, 0.01, 0.001}) {
        CHECK(familyMass(rep.family, e, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rep.family.eval(e, 1.0001) == 0.0);
        CHECK(rep.family.eval(e, -1.5) == 0.0);
    }

    // Measured L1 masses are reported; the 1+1/m schedule is met for the
    // small m and the note says which.
    CHECK(rep.absMass[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.absMass[2] == doctest::Approx(1.2471430).epsilon(1e-5));
    CHECK(contains(rep.note, "{1, 2, 3}"));

    StrictDeltaReport deep = strictDeltaNet(b, 8);
    CHECK(deep.cap == 8);
    CHECK(deep.derivSup[8] > 1e13);
    CHECK_THROWS_AS(strictDeltaNet(b, 9), ArgumentError);
}

TEST_CASE("embedding comparison decides scale equivalence") {
    Mollifier m2 = Mollifier::build(2);
    Net bn = Net::symbolic(rx::epsInv());

    Verdict same = compareEmbeddings(bn, bn, m2);
    CHECK(same.holds());
    CHECK(same.mode == Mode::Exact);
    CHECK(mentions(same, "delta-at-zero"));

    Verdict doubled = compareEmbeddings(bn, Net::symbolic(rx::mul(rx::lit(2), rx::epsInv())), m2);
    CHECK(doubled.fails());
    CHECK(doubled.mode == Mode::Exact);

    // A deviation below every power of the scale is invisible.
    Net close = Net::symbolic(rx::add(rx::epsInv(), rx::exp(rx::neg(rx::epsInv()))));
    Verdict near = compareEmbeddings(bn, close, m2);
    CHECK(near.holds());
    CHECK(near.mode == Mode::Exact);

    CHECK(compareEmbeddings(Net::callable([](double e) { return 1.0 / e; }), bn, m2).status ==
          Status::Inconclusive);
}

TEST_CASE("plateau geometry") {
    auto psi = plateau(0.9, 0.5);
    CHECK(psi(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi(-0.49) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi(0.7) == doctest::Approx(0.5).epsilon(1e-12));  // symmetric midpoint
    CHECK(psi(0.9) == 0.0);
    CHECK(psi(-1.2) == 0.0);
    for (int i = 0; i <= 50; ++i) {
        double v = psi(-1.0 + 2.0 * i / 50.0);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(plateau(0.5, 0.6), ArgumentError);
}

TEST_CASE("principal necessity: lower bounds hold and escaping members block agreement") {
    Mollifier m4 = Mollifier::build(4);
    RateExpr b = rx::epsInv();
    auto psi = plateau(0.9, 0.5);

    PrincipalNecessityReport rep = principalNecessityCertificate(
        b, Gauge::expOf(Gauge::powers(rx::epsInv())), {1, 2, 3, 4}, m4, psi, 0.9, 0.5);

    // L_m positive and decreasing (frozen quadrature values, M=4, q=0.5).
    REQUIRE(rep.lowerBounds.size() == 4);
    CHECK(rep.lowerBounds[0] == doctest::Approx(6.17894001e-02).epsilon(1e-7));
    CHECK(rep.lowerBounds[1] == doctest::Approx(8.58186112e-03).epsilon(1e-7));
    CHECK(rep.lowerBounds[2] == doctest::Approx(1.46694045e-03).epsilon(1e-7));
    CHECK(rep.lowerBounds[3] == doctest::Approx(2.77344487e-04).epsilon(1e-7));
    for (std::size_t i = 0; i + 1 < rep.lowerBounds.size(); ++i) {
        CHECK(rep.lowerBounds[i] > 0.0);
        CHECK(rep.lowerBounds[i] > rep.lowerBounds[i + 1]);
    }
    for (const auto& v : rep.lowerBoundChecks) CHECK(v.holds());

    CHECK_FALSE(rep.agreementConsistent);
    CHECK(rep.generatorTest.fails());
    REQUIRE(rep.escaper.has_value());
    CHECK(rep.escaper->str() == "exp(eps^-1)");
    REQUIRE(rep.escapeBlocks.size() == 4);
    for (const auto& v : rep.escapeBlocks) {
        CHECK(v.fails());
        CHECK(v.mode == Mode::Exact);
    }
    CHECK(contains(rep.summary, "agreement impossible"));

    // Direct form of the blocking oracle: eps^m is never O(exp(-eps^-2)).
    for (int m = 1; m <= 4; ++m) {
        Verdict v = bigO(Net::symbolic(rx::epsPow(Rational(m))),
                        Net::symbolic(rx::exp(rx::neg(rx::pow(rx::epsInv(), Rational(2))))));
        CHECK(v.fails());
        CHECK(v.mode == Mode::Exact);
    }

    // When the scale generates the family the certificate reports agreement.
    PrincipalNecessityReport ok = principalNecessityCertificate(
        b, Gauge::powers(rx::epsInv(), Gauge::ExponentDomain::Naturals), {1, 2}, m4, psi, 0.9,
        0.5);
    CHECK(ok.agreementConsistent);
    CHECK(ok.generatorTest.holds());
    CHECK(contains(ok.summary, "consistent"));

    CHECK_THROWS_AS(principalNecessityCertificate(b, Gauge::powers(rx::epsInv()), {1}, m4, psi,
                                                  0.5, 0.9),
                    ArgumentError);  // q > p
    // The M=4 mollifier goes negative before |x| = 1.2: positivity guard.
    CHECK_THROWS_AS(principalNecessityCertificate(b, Gauge::powers(rx::epsInv()), {1}, m4,
                                                  plateau(1.2, 0.5), 1.2, 0.5),
                    ArgumentError);
}

TEST_CASE("delta pairings converge at the moment rate") {
    Mollifier m2 = Mollifier::build(2);
    Mollifier m4 = Mollifier::build(4);
    RateExpr b = rx::epsInv();
    SmoothProfile bump = SmoothProfile::bump();
    const double bumpAt0 = std::exp(-1.0);

    PairingReport r2 = deltaPairing(CompactDistribution::delta(0.0), bump, b, m2);
    CHECK(r2.exact == doctest::Approx(bumpAt0).epsilon(1e-12));
    CHECK(r2.fit.slope > 3.3);
    CHECK(r2.rows.back().error < 1e-10);

    PairingReport r4 = deltaPairing(CompactDistribution::delta(0.0), bump, b, m4);
    CHECK(r4.fit.slope > 4.5);

    PairingReport shifted = deltaPairing(CompactDistribution::delta(0.3), bump, b, m4);
    CHECK(shifted.exact == doctest::Approx(bump(0.3)).epsilon(1e-12));
    CHECK(shifted.fit.slope > 4.5);

    // Derivative pairing: <d delta, phi> = -phi'(0).
    SmoothProfile phiAsym = bump.timesPoly({1.0, 1.0});
    PairingReport dr = deltaPairing(CompactDistribution::derivedDelta(1, 0.0), phiAsym, b, m2);
    CHECK(dr.exact == doctest::Approx(-bumpAt0).epsilon(1e-12));
    CHECK(dr.fit.slope > 3.3);

    CHECK_THROWS_AS(deltaPairing(CompactDistribution::delta(0.0), SmoothProfile::sine(), b, m2),
                    ArgumentError);
}

TEST_CASE("density pairings reproduce the exact integrals") {
    Mollifier m2 = Mollifier::build(2);
    RateExpr b = rx::epsInv();
    SmoothProfile bump = SmoothProfile::bump();

    // Polynomial density of degree <= M embeds exactly: zero error rows.
    SmoothProfile f = SmoothProfile::poly({1.0, 0.5});
    PairingReport pr = deltaPairing(CompactDistribution::density(f, -1.5, 1.5), bump, b, m2);
    double bumpMass = integrate([&](double x) { return bump(x); }, -1.0, 1.0, {1e-12, 48});
    CHECK(pr.exact == doctest::Approx(bumpMass).epsilon(1e-9));  // odd part integrates away
    for (const auto& row : pr.rows) CHECK(row.error < 1e-11);

    PairingReport br = deltaPairing(CompactDistribution::density(bump, -1.0, 1.0), bump, b, m2);
    CHECK(br.exact == doctest::Approx(0.1330861208).epsilon(1e-8));
    CHECK(br.fit.slope > 3.0);
    CHECK(br.rows.back().error < 1e-10);
}

TEST_CASE("distribution terms validate and report their structure") {
    CHECK_THROWS_AS(CompactDistribution::derivedDelta(-1, 0.0), ArgumentError);
    CHECK_THROWS_AS(CompactDistribution::density(SmoothProfile::bump(), 1.0, -1.0),
                    ArgumentError);
    CompactDistribution w =
        CompactDistribution::delta(0.5).plus(
            CompactDistribution::derivedDensity(2, SmoothProfile::bump(), -1.0, 1.0, 3.0));
    auto [lo, hi] = w.supportHull();
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(1.0));
    CHECK(contains(w.describe(), "delta@0.5"));
    CHECK(contains(w.describe(), "d^2 density"));
    CHECK(w.scaled(2.0).terms()[1].scale == doctest::Approx(6.0));

    // Derived-density pairing equals the integration-by-parts formula.
    SmoothProfile phi = SmoothProfile::bump().timesPoly({0.0, 0.0, 1.0});  // x^2 bump
    CompactDistribution dd = CompactDistribution::derivedDensity(1, SmoothProfile::bump(), -1.0, 1.0);
    double byParts = -integrate(
        [&](double x) {
            return SmoothProfile::bump()(x) * phi.derivative()(x);
        },
        -1.0, 1.0, {1e-12, 48});
    CHECK(dd.pairWith(phi) == doctest::Approx(byParts).epsilon(1e-10));
}
