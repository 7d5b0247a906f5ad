#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "agcal/asymptotics.hpp"
#include "agcal/net.hpp"
#include "agcal/parser.hpp"

using namespace agcal;

namespace {

Net sym(const std::string& text) { return Net::symbolic(text); }

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

} // namespace

TEST_CASE("power scales compare exactly") {
    const Verdict v = bigO(sym("eps^-2"), sym("eps^-3"));
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
    CHECK(v.confidence == 1.0);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->boundConstant == 1.0);
    CHECK(v.witness->eps0 == 1.0);
    CHECK(v.witness->boundExact);

    const Verdict back = bigO(sym("eps^-3"), sym("eps^-2"));
    CHECK(back.fails());
    CHECK(back.mode == Mode::Exact);
    REQUIRE(back.counterexample.size() >= 3);
    for (std::size_t i = 1; i < back.counterexample.size(); ++i)
        CHECK(back.counterexample[i] < back.counterexample[i - 1]);
}

TEST_CASE("same class reports the constant ratio") {
    const Verdict v = bigO(sym("7 * eps^-1"), sym("eps^-1"));
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->boundConstant == doctest::Approx(7.0));
    CHECK(v.witness->boundExact);
    CHECK(v.witness->eps0 == 1.0);
    checkWitness(sym("7 * eps^-1"), sym("eps^-1"), v);
}

TEST_CASE("logs sit below every power") {
    CHECK(bigO(sym("log(eps^-1)"), sym("eps^-1/10")).holds());
    CHECK(bigO(sym("log(eps^-1)^7"), sym("eps^-1/10")).holds());
    CHECK(bigO(sym("eps^-1/10"), sym("log(eps^-1)^7")).fails());
    // Iterated logs sit below plain logs.
    CHECK(bigO(sym("log(log(eps^-1))^9"), sym("log(eps^-1)")).holds());
}

TEST_CASE("exponential tower ranks") {
    CHECK(bigO(sym("eps^-50"), sym("exp(eps^-1)")).holds());
    CHECK(bigO(sym("exp(eps^-1)"), sym("exp@2(eps^-1)")).holds());
    CHECK(bigO(sym("exp@2(eps^-1)"), sym("exp(eps^-1)")).fails());
    CHECK(bigO(sym("exp(eps^-1)^10"), sym("exp@2(eps^-1)")).holds());
    // The super-exponential atom dominates every fixed tower.
    CHECK(bigO(sym("exp@6(eps^-1)"), sym("hyper(1)")).holds());
    CHECK(bigO(sym("hyper(1)"), sym("exp@6(eps^-1)")).fails());
    CHECK(bigO(sym("hyper(1)"), sym("hyper(2)")).holds());
    CHECK(bigO(sym("hyper(2)"), sym("hyper(1)")).fails());
    CHECK(bigO(sym("hyper(1/2)"), sym("hyper(1/2)")).holds());
}

TEST_CASE("exp folds sums of foldable values") {
    // exp(1/eps + log(1/eps)) = exp(1/eps) * (1/eps)
    const Verdict v = bigO(sym("exp(eps^-1 + log(eps^-1))"),
                           sym("eps^-1 * exp(eps^-1)"));
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
    const Verdict w = bigO(sym("eps^-1 * exp(eps^-1)"),
                           sym("exp(eps^-1 + log(eps^-1))"));
    CHECK(w.holds());
}

TEST_CASE("symbolic limits") {
    const LimitValue zero = limitOf(sym("eps^2 * eps^-1"));
    CHECK(zero.kind == LimitValue::Kind::Finite);
    CHECK(zero.value == 0.0);
    CHECK(zero.mode == Mode::Exact);

    const LimitValue three = limitOf(sym("3 + eps"));
    CHECK(three.kind == LimitValue::Kind::Finite);
    CHECK(three.value == doctest::Approx(3.0));
    CHECK(three.exact);

    CHECK(limitOf(sym("eps^-1")).kind == LimitValue::Kind::PlusInf);
    CHECK(limitOf(sym("-log(eps^-1)")).kind == LimitValue::Kind::MinusInf);

    const LimitValue sq = limitOf(sym("(1 + eps)^2"));
    CHECK(sq.kind == LimitValue::Kind::Finite);
    CHECK(sq.value == doctest::Approx(1.0));
}

TEST_CASE("positive limit forces eventual positivity") {
    const Verdict v = orderGt(sym("3 - log(eps^-1)^-1"), Net::zero());
    CHECK(v.holds());
    CHECK(v.mode == Mode::Exact);
    const Verdict w = orderGt(sym("eps - eps^2"), Net::zero());
    CHECK(w.holds());
    const Verdict eq = orderGt(sym("eps^-1"), sym("eps^-1"));
    CHECK(eq.fails());
}

TEST_CASE("order relation between nets") {
    CHECK(orderGt(sym("eps^-2"), sym("eps^-1")).holds());
    CHECK(orderGt(sym("eps^-1"), sym("eps^-2")).fails());
    CHECK(orderGt(sym("log(eps^-1)"), sym("5")).holds());
}

TEST_CASE("big-O laws on a growth pool") {
    const std::vector<std::string> pool = {
        "1",        "eps",          "eps^1/2",          "eps^-1",
        "eps^-3/2", "eps^-2",       "log(eps^-1)",      "log(eps^-1)^3",
        "7 * eps^-1", "eps^-1 * log(eps^-1)", "exp(eps^-1)", "exp@2(eps^-1)",
        "hyper(1)",
    };
    std::vector<Net> nets;
    for (const auto& s : pool) nets.push_back(sym(s));

    std::mt19937_64 rng(7130255);
    std::uniform_int_distribution<std::size_t> pick(0, nets.size() - 1);

    for (int it = 0; it < 220; ++it) {
        const Net& x = nets[pick(rng)];
        const Net& y = nets[pick(rng)];
        const Net& z = nets[pick(rng)];

        // Reflexivity.
        CHECK(bigO(x, x).holds());
        // Transitivity.
        if (bigO(x, y).holds() && bigO(y, z).holds()) CHECK(bigO(x, z).holds());
        // Scalars fold into the bound constant.
        if (bigO(x, y).holds()) {
            CHECK(bigO(Net::symbolic(rx::mul(rx::lit(Rational(-5, 3)), x.expr())), y).holds());
        }
        // Sums are bounded by the sum of bounds.
        if (bigO(x, z).holds() && bigO(y, z).holds()) CHECK(bigO(x + y, z).holds());
        const Net sumBound = Net::symbolic(rx::add(rx::absv(x.expr()), rx::absv(y.expr())));
        CHECK(bigO(x, sumBound).holds());
        // Products multiply.
        if (bigO(x, y).holds() && bigO(z, y).holds())
            CHECK(bigO(x * z, y * y).holds());
        // Positive powers preserve domination.
        if (bigO(x, y).holds()) {
            const Net xp = Net::symbolic(rx::pow(rx::absv(x.expr()), Rational(1, 2)));
            const Net yp = Net::symbolic(rx::pow(rx::absv(y.expr()), Rational(1, 2)));
            CHECK(bigO(xp, yp).holds());
        }
        // Antisymmetry up to class equality: both directions means same class,
        // so the witnesses certify a two-sided sandwich.
        const Verdict fwd = bigO(x, y);
        const Verdict bwd = bigO(y, x);
        if (fwd.holds() && bwd.holds()) {
            checkWitness(x, y, fwd);
            checkWitness(y, x, bwd);
        }
    }
}

TEST_CASE("exact witnesses certify on refined grids") {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"eps^-2", "eps^-3"},
        {"7 * eps^-1", "eps^-1"},
        {"log(eps^-1)^4", "eps^-1/2"},
        {"eps^-1 * log(eps^-1)", "eps^-2"},
        {"exp(eps^-1)", "exp@2(eps^-1)"},
        {"eps^-1 + eps^-2", "eps^-2"},
        {"eps^-2 + log(eps^-1)", "3 * eps^-2"},
    };
    for (const auto& [xs, ys] : cases) {
        CAPTURE(xs);
        CAPTURE(ys);
        const Net x = sym(xs), y = sym(ys);
        const Verdict v = bigO(x, y);
        CHECK(v.mode == Mode::Exact);
        checkWitness(x, y, v);
    }
}

TEST_CASE("callable nets take the fitted path") {
    const Net wob = Net::callable(
        [](double e) { return (2.0 + std::sin(1.0 / e)) / e; }, "wobble");
    const Verdict v = bigO(wob, sym("eps^-1"));
    CHECK(v.holds());
    CHECK(v.mode == Mode::Numeric);
    CHECK(v.confidence < 1.0);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->boundConstant <= 3.3);
    CHECK(v.witness->boundConstant >= 2.0);

    const Net steep = Net::callable([](double e) { return 1.0 / (e * e); }, "sq");
    const Verdict f = bigO(steep, sym("eps^-1"));
    CHECK(f.fails());
    CHECK(f.mode == Mode::Numeric);
    REQUIRE(!f.counterexample.empty());
    for (std::size_t i = 1; i < f.counterexample.size(); ++i)
        CHECK(f.counterexample[i] < f.counterexample[i - 1]);
}

TEST_CASE("oscillating sign stays inconclusive") {
    const Net osc = Net::callable([](double e) { return std::sin(1.0 / e); }, "osc");
    const Verdict v = orderGt(osc, Net::zero());
    CHECK(v.status == Status::Inconclusive);
}

TEST_CASE("near-cancellation falls back to numerics honestly") {
    // exp(1/eps + eps) - exp(1/eps) has two classes with ratio -> 1; the
    // symbolic layer refuses to call the sign and numerics take over.
    const Net diff = sym("exp(eps^-1 + eps) - exp(eps^-1)");
    const Verdict v = bigO(diff, sym("exp(eps^-1)"));
    CHECK(v.mode == Mode::Numeric);
    CHECK(v.holds());
    const LimitValue lv = limitOf(diff);
    CHECK(lv.mode == Mode::Numeric);
    CHECK(lv.kind == LimitValue::Kind::PlusInf);
}

TEST_CASE("eventually with a threshold predicate") {
    const Verdict v = eventually(IndexSet::halfOpenUnit(),
                                 [](double e) { return e < 0.37; });
    CHECK(v.holds());
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->eps0 == doctest::Approx(0.37).epsilon(0.02));

    const Verdict all = eventually(IndexSet::halfOpenUnit(),
                                   [](double) { return true; });
    CHECK(all.holds());
    CHECK(all.witness->eps0 == 1.0);

    const Verdict f = eventually(IndexSet::halfOpenUnit(),
                                 [](double e) { return std::sin(1.0 / e) > 0.0; });
    CHECK(f.fails());
    REQUIRE(f.counterexample.size() >= 3);
    for (std::size_t i = 1; i < f.counterexample.size(); ++i)
        CHECK(f.counterexample[i] < f.counterexample[i - 1]);

    CHECK_THROWS_AS(eventually(IndexSet::halfOpenUnit(), [](double) { return true; }, 0),
                    ArgumentError);
}

TEST_CASE("eventually over the naturals") {
    const Verdict v = eventually(IndexSet::naturalsFrechet(),
                                 [](double n) { return n >= 17.0; });
    CHECK(v.holds());
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->eps0 == doctest::Approx(17.0));

    const Verdict f = eventually(IndexSet::naturalsFrechet(),
                                 [](double n) { return static_cast<long>(n) % 2 == 0; });
    CHECK(f.fails());
}

TEST_CASE("composed index decides through the scale") {
    const IndexSet idx = IndexSet::composed(parse("eps^2"));
    const Net x = Net::symbolic("eps^-1", idx);
    const Net y = Net::symbolic("eps^-2", idx);
    // At scale eps^2 these are eps^-2 and eps^-4.
    CHECK(bigO(x, y).holds());
    CHECK(bigO(y, x).fails());
    CHECK(x.at(0.5) == doctest::Approx(4.0));
    CHECK_THROWS_AS(bigO(x, sym("eps^-1")), ArgumentError);
}

TEST_CASE("sampled nets interpolate and compare") {
    std::vector<double> eps, val;
    double e = 0.5;
    for (int i = 0; i < 20; ++i, e *= 0.75) {
        eps.push_back(e);
        val.push_back(1.0 / e);
    }
    const Net s = Net::sampled(eps, val);
    CHECK(s.at(eps[3]) == doctest::Approx(val[3]));
    CHECK(s.at(0.31) == doctest::Approx(1.0 / 0.31).epsilon(0.05));
    const Verdict v = bigO(s, sym("eps^-1"), [] {
        NumericOptions o;
        o.grid = {0.45, 0.8, 30};
        return o;
    }());
    CHECK(v.holds());
    CHECK(v.mode == Mode::Numeric);
}

TEST_CASE("grid points run toward the limit") {
    const auto unit = gridPoints(IndexSet::halfOpenUnit(), GridSpec{});
    REQUIRE(unit.size() == 40);
    CHECK(unit.front() == doctest::Approx(0.1));
    for (std::size_t i = 1; i < unit.size(); ++i) CHECK(unit[i] < unit[i - 1]);

    const auto nat = gridPoints(IndexSet::naturalsFrechet(), GridSpec{}, 50);
    REQUIRE(nat.size() == 50);
    CHECK(nat[0] == doctest::Approx(1.0));
    CHECK(nat[49] == doctest::Approx(1.0 / 50));
}

TEST_CASE("normal form views name the dominant class") {
    const auto nf = normalize(parse("5 * eps^-2 * log(eps^-1) + eps^-1"));
    const auto view = makeView(nf);
    CHECK(!view.zero);
    CHECK(view.constant == doctest::Approx(5.0));
    CHECK(view.sumRemainder);
    CHECK(view.towerExponents.at(0) == Rational(2));
    CHECK(view.towerExponents.at(-1) == Rational(1));
}
