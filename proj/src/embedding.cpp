#include "agcal/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agcal/asymptotics.hpp"
#include "agcal/errors.hpp"
#include "agcal/quadrature.hpp"

namespace agcal {

namespace {

constexpr double kGaussTail = 26.0;  // e^{-26^2} < 1e-293
constexpr double kSqrtPi = 1.7724538509055160273;

// Reduced Gaussian moments r_{2s} = (2s-1)!!/2^s, so that the even moments
// of e^{-x^2} are sqrt(pi) * r_{2s}.
std::vector<double> reducedGaussMoments(int upToHalf) {
    std::vector<double> r(upToHalf + 1);
    r[0] = 1.0;
    for (int s = 1; s <= upToHalf; ++s) r[s] = r[s - 1] * (2 * s - 1) / 2.0;
    return r;
}

// Dense solve with partial pivoting; cond receives max|pivot|/min|pivot|.
// Returns nullopt on a vanishing pivot.
std::optional<std::vector<double>> solvePivot(std::vector<std::vector<double>> A,
                                              std::vector<double> rhs, double& cond) {
    const int n = static_cast<int>(rhs.size());
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        pmax = std::max(pmax, std::fabs(A[col][col]));
        pmin = std::min(pmin, std::fabs(A[col][col]));
        for (int r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    cond = pmax / pmin;
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

double factorialOf(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

std::vector<double> derivVec(const std::vector<double>& p) {
    if (p.size() <= 1) return {};
    std::vector<double> d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
    return d;
}

SmoothProfile derivN(SmoothProfile f, int n) {
    for (int i = 0; i < n; ++i) f = f.derivative();
    return f;
}

void requireInfinite(const RateExpr& b, const char* what) {
    try {
        NormalForm nf = normalize(b);
        auto lim = nf.limit();
        if (lim.kind != NormalForm::Limit::Kind::PlusInf)
            throw ArgumentError(std::string(what) + " must diverge to +infinity, got " + b.str());
    } catch (const FragmentError&) {
        throw ArgumentError(std::string(what) + " must have a decidable +infinity limit, got " +
                            b.str());
    }
}

// k-th moment of rho. The construction makes moments 1..M vanish and every
// odd moment vanishes by symmetry; those are returned as their exact values,
// higher even moments by quadrature.
double momentValue(const Mollifier& rho, int k) {
    if (k == 0) return 1.0;
    if (k % 2 == 1) return 0.0;
    if (k <= rho.momentOrder()) return 0.0;
    const SmoothProfile& r = rho.profile();
    return integrate([&](double t) { return std::pow(t, k) * r(t); }, -kGaussTail, kGaussTail,
                     {1e-13, 48});
}

// The eps-family contributed by one distribution term.
SmoothFamily termFamily(const CompactDistribution::Term& term, const RateExpr& b,
                        const Mollifier& rho) {
    using TermKind = CompactDistribution::TermKind;
    const SmoothProfile rp = rho.profile();
    switch (term.kind) {
        case TermKind::PointMass: {
            SmoothProfile kern = derivN(rp, term.order);
            RateExpr out = rx::pow(b, Rational(1 + term.order));
            if (term.scale != 1.0) out = rx::mul(rx::numOrRational(term.scale), out);
            return SmoothFamily::scaledKernel(std::move(kern), b, std::move(out), term.location);
        }
        case TermKind::Density: {
            const SmoothProfile& f = *term.density;
            if (f.kind() == SmoothProfile::Kind::Poly) {
                // Exact Taylor path: f * rho_eps = sum_j (-1)^j mu_j / j! *
                // b^{-j} f^(j) for a global polynomial f.
                std::vector<SmoothFamily::Term> terms;
                std::vector<double> fj = f.mainPoly();
                for (int j = 0; !fj.empty(); ++j, fj = derivVec(fj)) {
                    double cj = term.scale * (j % 2 ? -1.0 : 1.0) * momentValue(rho, j) /
                                factorialOf(j);
                    if (std::fabs(cj) < 1e-300) continue;
                    RateExpr coef = rx::numOrRational(cj);
                    if (j > 0) coef = rx::mul(coef, rx::pow(b, Rational(-j)));
                    terms.push_back({std::move(coef), SmoothProfile::poly(fj)});
                }
                if (terms.empty()) return SmoothFamily::zero();
                return SmoothFamily::separable(std::move(terms));
            }
            double scale = term.scale, c = term.supLo, d = term.supHi;
            SmoothProfile dens = f;
            return SmoothFamily::blackBox(
                [dens, rp, b, scale, c, d](double eps, double x) {
                    double B = b.evalAt(eps);
                    if (!std::isfinite(B) || B <= 0.0) return 0.0;
                    double lo = std::max(c, x - kGaussTail / B);
                    double hi = std::min(d, x + kGaussTail / B);
                    if (!(lo < hi)) return 0.0;
                    return scale * integrate(
                                       [&](double t) { return dens(t) * B * rp(B * (x - t)); },
                                       lo, hi, {1e-10, 48});
                },
                4, "embedded density");
        }
        case TermKind::DerivedDensity: {
            SmoothProfile kern = derivN(rp, term.order);
            double scale = term.scale, c = term.supLo, d = term.supHi;
            int alpha = term.order;
            SmoothProfile dens = *term.density;
            return SmoothFamily::blackBox(
                [dens, kern, b, scale, c, d, alpha](double eps, double x) {
                    double B = b.evalAt(eps);
                    if (!std::isfinite(B) || B <= 0.0) return 0.0;
                    double lo = std::max(c, x - kGaussTail / B);
                    double hi = std::min(d, x + kGaussTail / B);
                    if (!(lo < hi)) return 0.0;
                    double amp = scale * std::pow(B, 1 + alpha);
                    return amp * integrate(
                                     [&](double t) { return dens(t) * kern(B * (x - t)); }, lo,
                                     hi, {1e-10, 48});
                },
                4, "embedded derived density");
        }
    }
    throw ArgumentError("unknown distribution term kind");
}

SmoothFamily distributionFamily(const CompactDistribution& w, const RateExpr& b,
                                const Mollifier& rho) {
    SmoothFamily total = SmoothFamily::zero();
    for (const auto& t : w.terms()) total = famAdd(total, termFamily(t, b, rho));
    return total;
}

// Decay-order fit shared by the residual and pairing reports: samples arrive
// ordered toward the limit, the fit uses the prefix above the noise floor.
SlopeFit fitDecay(const std::vector<double>& epsGrid, const std::vector<double>& bVals,
                  const std::vector<double>& values, double noiseFloor) {
    SlopeFit fit;
    std::vector<double> xs, ys;
    bool clipped = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        fit.samples.push_back({epsGrid[i], values[i]});
        if (clipped) continue;
        if (!(values[i] > noiseFloor) || !std::isfinite(bVals[i])) {
            clipped = true;
            continue;
        }
        xs.push_back(bVals[i]);
        ys.push_back(values[i]);
    }
    fit.noiseLimited = clipped;
    fit.used = static_cast<int>(xs.size());
    if (fit.used >= 2) fit.slope = -logLogSlope(xs, ys);
    return fit;
}

}  // namespace

// --- Mollifier ----------------------------------------------------------

Mollifier Mollifier::build(int momentOrder) {
    if (momentOrder < 0) throw ArgumentError("moment order must be >= 0");
    if (momentOrder > 12)
        throw ArgumentError("moment order is capped at 12; the Gaussian moment system becomes "
                            "too ill-conditioned beyond that");
    const int K = momentOrder / 2;
    std::vector<double> r = reducedGaussMoments(2 * K);
    std::vector<std::vector<double>> A(K + 1, std::vector<double>(K + 1));
    for (int s = 0; s <= K; ++s)
        for (int k = 0; k <= K; ++k) A[s][k] = r[s + k];
    std::vector<double> rhs(K + 1, 0.0);
    rhs[0] = 1.0;
    double cond = 1.0;
    auto d = solvePivot(A, rhs, cond);
    if (!d || cond > 1e12) {
        std::ostringstream os;
        os << "mollifier moment system is ill-conditioned at M=" << momentOrder
           << " (condition estimate " << (d ? cond : std::numeric_limits<double>::infinity())
           << ")";
        throw ConstructionError(os.str());
    }

    std::vector<double> coef(2 * K + 1, 0.0);
    for (int k = 0; k <= K; ++k) coef[2 * k] = (*d)[k] / kSqrtPi;

    Mollifier m;
    m.M_ = momentOrder;
    m.cond_ = cond;
    m.rho_ = SmoothProfile::gaussTimesPoly(coef);
    const SmoothProfile& rho = m.rho_;
    m.mass_ = integrate([&](double x) { return rho(x); }, -kGaussTail, kGaussTail, {1e-12, 48});
    m.absMass_ =
        integrate([&](double x) { return std::fabs(rho(x)); }, -kGaussTail, kGaussTail,
                  {1e-10, 48});
    m.rho0_ = rho(0.0);
    for (int k = 1; k <= momentOrder; ++k)
        m.moments_.push_back(integrate([&](double x) { return std::pow(x, k) * rho(x); },
                                       -kGaussTail, kGaussTail, {1e-12, 48}));
    return m;
}

double Mollifier::partialMoment(int m, double q) const {
    if (m < 0) throw ArgumentError("moment index must be >= 0");
    if (!(q > 0.0) || !std::isfinite(q)) throw ArgumentError("cut radius must be positive");
    const SmoothProfile& rho = rho_;
    return integrate([&](double t) { return std::pow(t, 2 * m) * rho(t); }, -q, q, {1e-12, 48});
}

std::string Mollifier::describe() const {
    std::ostringstream os;
    os << "mollifier(M=" << M_ << "): " << rho_.describe();
    return os.str();
}

// --- CompactDistribution ------------------------------------------------

namespace {

CompactDistribution::Term checkedTerm(CompactDistribution::Term t) {
    if (t.order < 0) throw ArgumentError("derivative order must be >= 0");
    if (!std::isfinite(t.scale)) throw ArgumentError("term scale must be finite");
    if (!(t.supLo <= t.supHi) || !std::isfinite(t.supLo) || !std::isfinite(t.supHi))
        throw ArgumentError("term support must be a finite interval");
    return t;
}

}  // namespace

CompactDistribution CompactDistribution::delta(double location, double scale) {
    return derivedDelta(0, location, scale);
}

CompactDistribution CompactDistribution::derivedDelta(int order, double location, double scale) {
    if (!std::isfinite(location)) throw ArgumentError("point mass location must be finite");
    Term t;
    t.kind = TermKind::PointMass;
    t.scale = scale;
    t.order = order;
    t.location = location;
    t.supLo = t.supHi = location;
    CompactDistribution w;
    w.terms_.push_back(checkedTerm(std::move(t)));
    return w;
}

CompactDistribution CompactDistribution::density(SmoothProfile f, double supLo, double supHi,
                                                 double scale) {
    Term t;
    t.kind = TermKind::Density;
    t.scale = scale;
    t.density = std::move(f);
    t.supLo = supLo;
    t.supHi = supHi;
    if (!(supLo < supHi)) throw ArgumentError("density support must be a nonempty interval");
    CompactDistribution w;
    w.terms_.push_back(checkedTerm(std::move(t)));
    return w;
}

CompactDistribution CompactDistribution::derivedDensity(int order, SmoothProfile f, double supLo,
                                                        double supHi, double scale) {
    Term t;
    t.kind = TermKind::DerivedDensity;
    t.scale = scale;
    t.order = order;
    t.density = std::move(f);
    t.supLo = supLo;
    t.supHi = supHi;
    if (!(supLo < supHi)) throw ArgumentError("density support must be a nonempty interval");
    CompactDistribution w;
    w.terms_.push_back(checkedTerm(std::move(t)));
    return w;
}

CompactDistribution CompactDistribution::plus(const CompactDistribution& other) const {
    CompactDistribution w = *this;
    w.terms_.insert(w.terms_.end(), other.terms_.begin(), other.terms_.end());
    return w;
}

CompactDistribution CompactDistribution::scaled(double c) const {
    if (!std::isfinite(c)) throw ArgumentError("scale must be finite");
    CompactDistribution w = *this;
    for (auto& t : w.terms_) t.scale *= c;
    return w;
}

std::pair<double, double> CompactDistribution::supportHull() const {
    if (terms_.empty()) return {0.0, 0.0};
    double lo = terms_.front().supLo, hi = terms_.front().supHi;
    for (const auto& t : terms_) {
        lo = std::min(lo, t.supLo);
        hi = std::max(hi, t.supHi);
    }
    return {lo, hi};
}

double CompactDistribution::pairWith(const SmoothProfile& phi) const {
    double total = 0.0;
    for (const auto& t : terms_) {
        double sign = (t.order % 2) ? -1.0 : 1.0;
        switch (t.kind) {
            case TermKind::PointMass: {
                SmoothProfile d = derivN(phi, t.order);
                total += t.scale * sign * d(t.location);
                break;
            }
            case TermKind::Density:
            case TermKind::DerivedDensity: {
                SmoothProfile d = (t.kind == TermKind::Density) ? phi : derivN(phi, t.order);
                double s = (t.kind == TermKind::Density) ? 1.0 : sign;
                double lo = t.supLo, hi = t.supHi;
                if (phi.compactSupport()) {
                    lo = std::max(lo, -1.0);
                    hi = std::min(hi, 1.0);
                }
                if (!(lo < hi)) break;
                const SmoothProfile& f = *t.density;
                total += t.scale * s *
                         integrate([&](double x) { return f(x) * d(x); }, lo, hi, {1e-12, 48});
                break;
            }
        }
    }
    return total;
}

std::string CompactDistribution::describe() const {
    std::ostringstream os;
    os << "dist[";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (i) os << " + ";
        if (t.scale != 1.0) os << t.scale << " * ";
        switch (t.kind) {
            case TermKind::PointMass:
                if (t.order > 0) os << "d^" << t.order << " ";
                os << "delta@" << t.location;
                break;
            case TermKind::Density:
                os << "density(" << t.density->describe() << ", [" << t.supLo << ", " << t.supHi
                   << "])";
                break;
            case TermKind::DerivedDensity:
                os << "d^" << t.order << " density(" << t.density->describe() << ", [" << t.supLo
                   << ", " << t.supHi << "])";
                break;
        }
    }
    os << "]";
    return os.str();
}

// --- model delta net and embedding --------------------------------------

SmoothFamily modelDeltaNet(const RateExpr& b, const Mollifier& rho) {
    requireInfinite(b, "the delta scale net");
    return SmoothFamily::scaledKernel(rho.profile(), b, b, 0.0);
}

GenFunction embed(const CompactDistribution& w, const RateExpr& b, const Mollifier& rho,
                  double lo, double hi) {
    if (!(lo < hi)) throw ArgumentError("domain must be a nonempty open interval");
    requireInfinite(b, "the embedding scale net");
    for (const auto& t : w.terms())
        if (!(t.supLo > lo && t.supHi < hi))
            throw ArgumentError("term support [" + std::to_string(t.supLo) + ", " +
                                std::to_string(t.supHi) + "] must sit inside the open domain");
    Gauge G = Gauge::powers(b, Gauge::ExponentDomain::Naturals);
    AlgebraSpec spec = AlgebraSpec::make(G, G);
    return GenFunction::make(distributionFamily(w, b, rho), std::move(spec), lo, hi);
}

// --- Taylor residual -----------------------------------------------------

SlopeFit taylorResidualSlope(const SmoothProfile& f, const RateExpr& b, const Mollifier& rho,
                             double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ArgumentError("need a bounded window");
    requireInfinite(b, "the mollification scale net");
    const SmoothProfile& rp = rho.profile();
    std::vector<double> eps = gridPoints(IndexSet::halfOpenUnit(), GridSpec{0.5, 0.7, 25});
    std::vector<double> bVals, resid;
    const int nx = 61;
    for (double e : eps) {
        double B = b.evalAt(e);
        double r = 0.0;
        for (int i = 0; i < nx; ++i) {
            double x = lo + (hi - lo) * i / (nx - 1);
            double conv = integrate([&](double t) { return f(x - t / B) * rp(t); }, -kGaussTail,
                                    kGaussTail, {2e-14, 48});
            r = std::max(r, std::fabs(conv - f(x)));
        }
        bVals.push_back(B);
        resid.push_back(r);
    }
    return fitDecay(eps, bVals, resid, 1e-12);
}

// --- strict delta nets ----------------------------------------------------

StrictDeltaReport strictDeltaNet(const RateExpr& b, int mCap) {
    requireInfinite(b, "the strict delta scale net");
    if (mCap < 0) throw ArgumentError("moment cap must be >= 0");
    if (mCap > 8)
        throw ArgumentError("moment cap is limited to 8; the bump moment system degrades beyond "
                            "that");
    const SmoothProfile bump = SmoothProfile::bump();
    const int Kmax = mCap / 2;
    std::vector<double> B2(2 * Kmax + 1);
    for (int r = 0; r <= 2 * Kmax; ++r)
        B2[r] = integrate([&](double x) { return std::pow(x, 2 * r) * bump(x); }, -1.0, 1.0,
                          {1e-12, 48});

    StrictDeltaReport rep;
    std::vector<SmoothProfile> phiByK;
    int effectiveK = -1;
    for (int K = 0; K <= Kmax; ++K) {
        std::vector<std::vector<double>> A(K + 1, std::vector<double>(K + 1));
        for (int s = 0; s <= K; ++s)
            for (int k = 0; k <= K; ++k) A[s][k] = B2[s + k];
        std::vector<double> rhs(K + 1, 0.0);
        rhs[0] = 1.0;
        double cond = 1.0;
        auto c = solvePivot(A, rhs, cond);
        if (!c || cond > 1e12) {
            std::ostringstream os;
            os << "bump moment system condition " << (c ? cond : 0.0) << " at m=" << 2 * K
               << "; cap lowered to " << (2 * K - 1);
            rep.note = os.str();
            break;
        }
        std::vector<double> poly(2 * K + 1, 0.0);
        for (int k = 0; k <= K; ++k) poly[2 * k] = (*c)[k];
        phiByK.push_back(bump.timesPoly(poly));
        effectiveK = K;
    }
    if (effectiveK < 0) throw ConstructionError("strict delta net: no usable moment profile");
    rep.cap = std::min(mCap, 2 * effectiveK + 1);

    std::vector<SmoothProfile> phi;  // phi_m, m = 0..cap
    for (int m = 0; m <= rep.cap; ++m) phi.push_back(phiByK[m / 2]);

    double running = 0.0;
    for (int m = 0; m <= rep.cap; ++m) {
        SmoothProfile d = phi[m];
        double sup = 0.0;
        for (int alpha = 0; alpha <= m; ++alpha) {
            sup = std::max(sup, d.maxAbsOn(-1.0, 1.0));
            if (alpha < m) d = d.derivative();
        }
        running = std::max(running, sup);
        rep.derivSup.push_back(running);
        const SmoothProfile& pm = phi[m];
        rep.absMass.push_back(
            integrate([&](double x) { return std::fabs(pm(x)); }, -1.0, 1.0, {1e-10, 48}));
    }

    std::vector<double> eps = gridPoints(IndexSet::halfOpenUnit(), GridSpec{});
    for (double e : eps) {
        double be;
        try {
            be = b.evalAt(e);
        } catch (const OverflowSignal&) {
            be = std::numeric_limits<double>::infinity();
        }
        int m = 0;
        for (int k = rep.cap; k >= 0; --k)
            if (rep.derivSup[k] <= be) {
                m = k;
                break;
            }
        rep.rows.push_back({e, m, be});
    }

    std::vector<double> table = rep.derivSup;
    std::vector<SmoothProfile> phis = phi;
    int cap = rep.cap;
    rep.family = SmoothFamily::blackBox(
        [phis, table, cap, b](double e, double x) {
            double be;
            try {
                be = b.evalAt(e);
            } catch (const OverflowSignal&) {
                be = std::numeric_limits<double>::infinity();
            }
            int m = 0;
            for (int k = cap; k >= 0; --k)
                if (table[k] <= be) {
                    m = k;
                    break;
                }
            return phis[m](x);
        },
        4, "strict delta net");

    std::ostringstream os;
    if (!rep.note.empty()) os << rep.note << "; ";
    os << "cap " << rep.cap << "; |phi_m| mass within 1+1/m for m in {";
    bool first = true;
    for (int m = 1; m <= rep.cap; ++m)
        if (rep.absMass[m] <= 1.0 + 1.0 / m + 1e-9) {
            if (!first) os << ", ";
            os << m;
            first = false;
        }
    os << "} (measured, schedule relaxed)";
    rep.note = os.str();
    return rep;
}

// --- embedding comparison -------------------------------------------------

Verdict compareEmbeddings(const Net& bNet, const Net& cNet, const Mollifier& rho) {
    if (std::fabs(rho.valueAtZero()) < 1e-12)
        throw ArgumentError("the comparison criterion needs rho(0) != 0");
    if (!bNet.isSymbolic() || !cNet.isSymbolic())
        return Verdict::inconclusive("comparison needs closed-form scale nets");
    const RateExpr b = bNet.expr();
    requireInfinite(b, "the first scale net");
    requireInfinite(cNet.expr(), "the second scale net");

    Gauge G = Gauge::powers(b, Gauge::ExponentDomain::Naturals, bNet.index());
    AlgebraSpec spec = AlgebraSpec::make(G, G);
    Verdict sym;
    try {
        GenNumber gb = GenNumber::make(bNet, spec);
        GenNumber gc = GenNumber::make(cNet, spec);
        sym = gnEq(gb, gc);
    } catch (const ConstructionError& e) {
        return Verdict::inconclusive(std::string("scale nets do not live in a common algebra: ") +
                                     e.what());
    }

    // Cross-check: the embedded deltas differ at 0 by (b_eps - c_eps) rho(0).
    Net diff = (bNet - cNet) * Net::symbolic(rx::num(rho.valueAtZero()), bNet.index());
    Verdict delta = isNegligibleNum(diff, G);

    if (delta.status == Status::Inconclusive) {
        sym.note = "delta-at-zero cross-check undecided; symbolic verdict stands";
        return sym;
    }
    if (delta.status == sym.status) {
        sym.note = "cross-checked by the delta-at-zero criterion";
        return sym;
    }
    return Verdict::inconclusive("symbolic equality and the delta-at-zero criterion disagree (" +
                                 std::string(statusName(sym.status)) + " vs " +
                                 statusName(delta.status) + ")");
}

// --- principal necessity --------------------------------------------------

std::function<double(double)> plateau(double p, double q) {
    if (!(0.0 < q && q < p)) throw ArgumentError("need 0 < q < p");
    auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    return [p, q, g](double x) {
        double t = (p - std::fabs(x)) / (p - q);
        double a = g(t), bb = g(1.0 - t);
        return a + bb > 0.0 ? a / (a + bb) : 0.0;
    };
}

PrincipalNecessityReport principalNecessityCertificate(
    const RateExpr& b, const Gauge& Z, const std::vector<int>& mRange, const Mollifier& rho,
    const std::function<double(double)>& psi, double p, double q) {
    if (!(0.0 < q && q < p) || !(q < 1.0))
        throw ArgumentError("need 0 < q < min(p, 1) for the plateau geometry");
    if (mRange.empty()) throw ArgumentError("need at least one moment index");
    for (int m : mRange)
        if (m < 1) throw ArgumentError("moment indices must be >= 1");
    requireInfinite(b, "the scale net");

    const SmoothProfile& rp = rho.profile();
    for (int i = 0; i <= 200; ++i) {
        double x = -p + 2.0 * p * i / 200.0;
        if (!(rp(x) > 0.0))
            throw ArgumentError("the mollifier must be positive on (-p, p); fails near x=" +
                                std::to_string(x));
    }
    for (int i = 0; i <= 300; ++i) {
        double x = -(p + 0.5) + (2.0 * p + 1.0) * i / 300.0;
        double v = psi(x);
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw ArgumentError("the plateau must take values in [0, 1]");
        if (std::fabs(x) <= q && std::fabs(v - 1.0) > 1e-6)
            throw ArgumentError("the plateau must equal 1 on [-q, q]");
        if (std::fabs(x) >= p + 1e-9 && std::fabs(v) > 1e-9)
            throw ArgumentError("the plateau must vanish outside (-p, p)");
    }

    PrincipalNecessityReport rep;
    rep.mRange = mRange;
    std::vector<double> eps = gridPoints(IndexSet::halfOpenUnit(), GridSpec{0.5, 0.7, 12});
    for (int m : mRange) {
        double L = rho.partialMoment(m, q);
        rep.lowerBounds.push_back(L);
        bool ok = true;
        double eps0 = eps.empty() ? 1.0 : eps.front();
        std::vector<double> cex;
        for (double e : eps) {
            double B = b.evalAt(e);
            // c_eps(m): the embedded delta integrated against the scaled
            // test function s^{2m} B^{2m} psi(B s).
            double c = integrate(
                [&](double s) {
                    return std::pow(s * B, 2 * m) * psi(B * s) * B * rp(B * s);
                },
                -p / B, p / B, {1e-12, 48});
            if (!(c >= L - 1e-9)) {
                ok = false;
                cex.push_back(e);
            }
        }
        rep.lowerBoundChecks.push_back(
            ok ? Verdict::holdsNumeric({1.0, eps0, false}, 0.9,
                                       "c_eps(m) >= L_m across the grid")
               : Verdict::failsNumeric(cex, 0.9, "c_eps(m) dipped below L_m"));
    }

    Gauge principal = Gauge::powers(b, Gauge::ExponentDomain::Naturals, Z.index());
    rep.generatorTest = equivalentGauges(principal, Z);
    rep.agreementConsistent = rep.generatorTest.holds();
    if (rep.agreementConsistent) {
        rep.summary = "embedding agreement consistent: " + b.str() +
                      " generates the negligibility family";
        return rep;
    }

    for (int j = 1; j <= 6 && !rep.escaper; ++j) {
        RateExpr z = Z.memberExprAt(j);
        if (isModerate(Net::symbolic(z, Z.index()), principal).fails()) rep.escaper = z;
    }
    if (!rep.escaper) {
        rep.summary = "generator test failed but no escaping member was located (j <= 6)";
        return rep;
    }
    bool allBlocked = true;
    for (int m : mRange) {
        Verdict v = bigO(Net::symbolic(rx::pow(b, Rational(-m)), Z.index()),
                         Net::symbolic(rx::pow(*rep.escaper, Rational(-1)), Z.index()));
        allBlocked = allBlocked && v.fails();
        rep.escapeBlocks.push_back(std::move(v));
    }
    rep.summary = allBlocked
                      ? "agreement impossible: member " + rep.escaper->str() +
                            " escapes every tested power of " + b.str()
                      : "escaping member found but some power dominations were not refuted";
    return rep;
}

// --- pairings -------------------------------------------------------------

PairingReport deltaPairing(const CompactDistribution& w, const SmoothProfile& phi,
                           const RateExpr& b, const Mollifier& rho) {
    if (!phi.compactSupport())
        throw ArgumentError("the test profile must be compactly supported");
    requireInfinite(b, "the pairing scale net");

    PairingReport rep;
    rep.exact = w.pairWith(phi);
    SmoothFamily fam = distributionFamily(w, b, rho);

    bool closedForm = true;
    for (const auto& t : w.terms())
        closedForm = closedForm &&
                     (t.kind == CompactDistribution::TermKind::PointMass ||
                      (t.kind == CompactDistribution::TermKind::Density &&
                       t.density->kind() == SmoothProfile::Kind::Poly));
    const double outerTol = closedForm ? 1e-12 : 3e-9;

    std::vector<double> eps = gridPoints(IndexSet::halfOpenUnit(), GridSpec{0.5, 0.7, 22});
    std::vector<double> bVals, errs;
    for (double e : eps) {
        double B = b.evalAt(e);
        // Split the integration at the point-mass spike windows: once the
        // kernels concentrate, a panel whose nodes all miss a spike would
        // silently drop its mass.
        std::vector<double> cuts{-1.0, 1.0};
        for (const auto& t : w.terms())
            if (t.kind == CompactDistribution::TermKind::PointMass) {
                for (double c : {t.location - kGaussTail / B, t.location + kGaussTail / B})
                    if (c > -1.0 && c < 1.0) cuts.push_back(c);
            }
        std::sort(cuts.begin(), cuts.end());
        double v = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            v += integrate([&](double x) { return fam.eval(e, x) * phi(x); }, cuts[i],
                           cuts[i + 1], {outerTol / static_cast<double>(cuts.size()), 48});
        double err = std::fabs(v - rep.exact);
        rep.rows.push_back({e, v, err});
        bVals.push_back(B);
        errs.push_back(err);
    }
    rep.fit = fitDecay(eps, bVals, errs, std::max(1e-12, 30.0 * outerTol));
    return rep;
}

}  // namespace agcal
