#include "agcal/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "agcal/errors.hpp"
#include "agcal/normal_form.hpp"

namespace agcal {

namespace {

// --- dense polynomial helpers, ascending coefficients ------------------

std::vector<double> trimPoly(std::vector<double> p) {
    while (!p.empty() && p.back() == 0.0) p.pop_back();
    return p;
}

bool polyIsZero(const std::vector<double>& p) {
    return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

bool polyIsConst(const std::vector<double>& p) {
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] != 0.0) return false;
    return true;
}

double evalPoly(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
    return v;
}

std::vector<double> derivPoly(const std::vector<double>& p) {
    std::vector<double> d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
    return trimPoly(d);
}

std::vector<double> addPoly(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> s(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) s[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) s[k] += b[k];
    return trimPoly(s);
}

std::vector<double> scalePoly(std::vector<double> p, double c) {
    for (double& v : p) v *= c;
    return trimPoly(p);
}

std::vector<double> mulPoly(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trimPoly(r);
}

// x * p
std::vector<double> shiftUp(const std::vector<double>& p) {
    if (p.empty()) return {};
    std::vector<double> r(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) r[k + 1] = p[k];
    return r;
}

std::string polyText(const std::vector<double>& p) {
    std::ostringstream os;
    os << "[";
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k) os << ", ";
        os << p[k];
    }
    os << "]";
    return os.str();
}

// Expression for P(arg) with numeric coefficients; used when a sup-norm
// reduces to a kernel value at an eps-dependent endpoint.
RateExpr polyAtExpr(const std::vector<double>& p, const RateExpr& arg) {
    std::vector<RateExpr> terms;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        if (k == 0) {
            terms.push_back(rx::num(p[0]));
        } else {
            RateExpr xk = (k == 1) ? arg : rx::pow(arg, Rational(static_cast<std::int64_t>(k)));
            terms.push_back(p[k] == 1.0 ? xk : rx::mul(rx::num(p[k]), xk));
        }
    }
    if (terms.empty()) return rx::lit(0);
    return terms.size() == 1 ? terms.front() : rx::add(terms);
}

// Golden-section polish of |f| around a bracketing interval.
double refineMaxAbs(const SmoothProfile& f, double a, double b, double seed) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = std::abs(f(c)), fd = std::abs(f(d));
    double best = std::max({seed, fc, fd});
    for (int i = 0; i < 160 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = std::abs(f(d));
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = std::abs(f(c));
        }
        best = std::max({best, fc, fd});
    }
    return best;
}

std::optional<NormalForm> tryNF(const RateExpr& e) {
    try {
        NormalForm nf = normalize(e);
        if (nf.ambiguous) return std::nullopt;
        return nf;
    } catch (const FragmentError&) {
        return std::nullopt;
    }
}

}  // namespace

// --- SmoothProfile -----------------------------------------------------

SmoothProfile SmoothProfile::poly(std::vector<double> coef) {
    return SmoothProfile(Kind::Poly, trimPoly(std::move(coef)), {}, 0);
}
SmoothProfile SmoothProfile::sine() { return SmoothProfile(Kind::Trig, {1.0}, {}, 0); }
SmoothProfile SmoothProfile::cosine() { return SmoothProfile(Kind::Trig, {}, {1.0}, 0); }
SmoothProfile SmoothProfile::expFn() { return SmoothProfile(Kind::Exp, {1.0}, {}, 0); }
SmoothProfile SmoothProfile::gauss() { return SmoothProfile(Kind::Gauss, {1.0}, {}, 0); }
SmoothProfile SmoothProfile::gaussTimesPoly(std::vector<double> coef) {
    return SmoothProfile(Kind::Gauss, trimPoly(std::move(coef)), {}, 0);
}
SmoothProfile SmoothProfile::bump() { return SmoothProfile(Kind::Bump, {1.0}, {}, 0); }

SmoothProfile SmoothProfile::derivative() const {
    switch (kind_) {
        case Kind::Poly:
            return SmoothProfile(Kind::Poly, derivPoly(p_), {}, 0);
        case Kind::Trig:
            // (P sin + Q cos)' = (P' - Q) sin + (P + Q') cos
            return SmoothProfile(Kind::Trig, addPoly(derivPoly(p_), scalePoly(q_, -1.0)),
                                 addPoly(p_, derivPoly(q_)), 0);
        case Kind::Exp:
            return SmoothProfile(Kind::Exp, addPoly(derivPoly(p_), p_), {}, 0);
        case Kind::Gauss:
            // (P e^(-x^2))' = (P' - 2xP) e^(-x^2)
            return SmoothProfile(Kind::Gauss, addPoly(derivPoly(p_), scalePoly(shiftUp(p_), -2.0)),
                                 {}, 0);
        case Kind::Bump: {
            // d/dx [N D^-m e^(-1/D)] with D = 1-x^2 has numerator
            // N' D^2 + 2mx N D - 2x N over D^(m+2).
            std::vector<double> D = {1.0, 0.0, -1.0};
            std::vector<double> n2 = mulPoly(derivPoly(p_), mulPoly(D, D));
            n2 = addPoly(n2, scalePoly(shiftUp(mulPoly(p_, D)), 2.0 * denPow_));
            n2 = addPoly(n2, scalePoly(shiftUp(p_), -2.0));
            return SmoothProfile(Kind::Bump, n2, {}, denPow_ + 2);
        }
    }
    throw ArgumentError("unknown profile kind");
}

double SmoothProfile::operator()(double x) const {
    switch (kind_) {
        case Kind::Poly:
            return evalPoly(p_, x);
        case Kind::Trig:
            return evalPoly(p_, x) * std::sin(x) + evalPoly(q_, x) * std::cos(x);
        case Kind::Exp:
            return evalPoly(p_, x) * std::exp(x);
        case Kind::Gauss:
            return evalPoly(p_, x) * std::exp(-x * x);
        case Kind::Bump: {
            double D = 1.0 - x * x;
            if (D <= 1e-12) return 0.0;  // the flat tail wins over any D^-m
            return evalPoly(p_, x) * std::exp(-1.0 / D) / std::pow(D, denPow_);
        }
    }
    throw ArgumentError("unknown profile kind");
}

SmoothProfile SmoothProfile::timesPoly(const std::vector<double>& coef) const {
    SmoothProfile out = *this;
    out.p_ = mulPoly(p_, coef);
    if (kind_ == Kind::Trig) out.q_ = mulPoly(q_, coef);
    return out;
}

std::optional<RateExpr> SmoothProfile::exprAt(const RateExpr& x) const {
    switch (kind_) {
        case Kind::Poly:
            return polyAtExpr(p_, x);
        case Kind::Exp:
            return rx::mul(polyAtExpr(p_, x), rx::exp(x));
        case Kind::Gauss:
            return rx::mul(polyAtExpr(p_, x), rx::exp(rx::neg(rx::pow(x, Rational(2)))));
        case Kind::Trig:
        case Kind::Bump:
            return std::nullopt;
    }
    return std::nullopt;
}

double SmoothProfile::maxAbsOn(double lo, double hi) const {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ArgumentError("profile maximum needs a finite interval [lo, hi]");
    if (lo == hi) return std::abs((*this)(lo));
    const int N = 800;
    double best = 0.0;
    int bestAt = 0;
    for (int i = 0; i <= N; ++i) {
        double x = lo + (hi - lo) * i / N;
        double v = std::abs((*this)(x));
        if (v > best) {
            best = v;
            bestAt = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, bestAt - 1) / N;
    double b = lo + (hi - lo) * std::min(N, bestAt + 1) / N;
    return refineMaxAbs(*this, a, b, best);
}

bool SmoothProfile::isZero() const {
    switch (kind_) {
        case Kind::Trig:
            return polyIsZero(p_) && polyIsZero(q_);
        default:
            return polyIsZero(p_);
    }
}

bool SmoothProfile::sameAs(const SmoothProfile& other) const {
    return kind_ == other.kind_ && trimPoly(p_) == trimPoly(other.p_) &&
           trimPoly(q_) == trimPoly(other.q_) && denPow_ == other.denPow_;
}

std::string SmoothProfile::describe() const {
    auto pre = [](const std::vector<double>& p) { return polyIsConst(p) && !p.empty() && p[0] == 1.0; };
    switch (kind_) {
        case Kind::Poly:
            return "poly" + polyText(p_);
        case Kind::Trig:
            if (polyIsZero(q_) && pre(p_)) return "sin";
            if (polyIsZero(p_) && pre(q_)) return "cos";
            return "poly" + polyText(p_) + "*sin + poly" + polyText(q_) + "*cos";
        case Kind::Exp:
            return pre(p_) ? "exp" : "poly" + polyText(p_) + "*exp";
        case Kind::Gauss:
            return pre(p_) ? "gauss" : "poly" + polyText(p_) + "*gauss";
        case Kind::Bump:
            if (pre(p_) && denPow_ == 0) return "bump";
            return "poly" + polyText(p_) + "/(1-x^2)^" + std::to_string(denPow_) + "*bump";
    }
    return "profile";
}

// --- SmoothFamily ------------------------------------------------------

SmoothFamily SmoothFamily::separable(std::vector<Term> terms) {
    SmoothFamily f;
    f.form_ = Form::SeparableSum;
    for (auto& t : terms) {
        if (!t.coef.valid()) throw ArgumentError("separable term needs a coefficient expression");
        if (t.profile.isZero()) continue;
        f.terms_.push_back(std::move(t));
    }
    return f;
}

SmoothFamily SmoothFamily::constantProfile(const SmoothProfile& p) {
    return separable({Term{rx::lit(1), p}});
}

SmoothFamily SmoothFamily::scaledKernel(SmoothProfile kernel, RateExpr scaleIn, RateExpr scaleOut,
                                        double shift) {
    if (!scaleIn.valid() || !scaleOut.valid())
        throw ArgumentError("scaled kernel needs both scale expressions");
    if (!std::isfinite(shift)) throw ArgumentError("kernel shift must be finite");
    SmoothFamily f;
    f.form_ = Form::ScaledKernel;
    f.terms_.push_back(Term{rx::lit(1), std::move(kernel)});
    f.scaleIn_ = std::move(scaleIn);
    f.scaleOut_ = std::move(scaleOut);
    f.shift_ = shift;
    return f;
}

SmoothFamily SmoothFamily::blackBox(std::function<double(double, double)> eval, int maxDerivOrder,
                                    std::string label) {
    if (!eval) throw ArgumentError("black-box family needs an evaluator");
    if (maxDerivOrder < 0) throw ArgumentError("derivative budget must be >= 0");
    SmoothFamily f;
    f.form_ = Form::BlackBox;
    f.eval_ = std::move(eval);
    f.derivBudget_ = maxDerivOrder;
    f.label_ = std::move(label);
    return f;
}

SmoothFamily SmoothFamily::zero() { return separable({}); }

int SmoothFamily::derivBudget() const {
    return form_ == Form::BlackBox ? derivBudget_ : std::numeric_limits<int>::max();
}

SmoothFamily SmoothFamily::derivative() const {
    switch (form_) {
        case Form::SeparableSum: {
            std::vector<Term> d;
            for (const auto& t : terms_) {
                SmoothProfile dp = t.profile.derivative();
                if (!dp.isZero()) d.push_back(Term{t.coef, dp});
            }
            return separable(std::move(d));
        }
        case Form::ScaledKernel: {
            SmoothProfile dk = kernel().derivative();
            if (dk.isZero()) return zero();
            return scaledKernel(dk, scaleIn_, rx::mul(scaleOut_, scaleIn_), shift_);
        }
        case Form::BlackBox: {
            if (derivBudget_ <= 0)
                throw CapabilityError("black-box family '" + label_ +
                                      "' has no derivative budget left");
            auto base = eval_;
            SmoothFamily f;
            f.form_ = Form::BlackBox;
            f.eval_ = [base](double eps, double x) {
                double h = 1e-4 * std::max(1.0, std::abs(x));
                return (base(eps, x + h) - base(eps, x - h)) / (2.0 * h);
            };
            f.derivBudget_ = derivBudget_ - 1;
            f.label_ = "d(" + label_ + ")";
            return f;
        }
    }
    throw ArgumentError("unknown family form");
}

double SmoothFamily::eval(double eps, double x) const {
    auto coefAt = [eps](const RateExpr& e) {
        try {
            return e.evalAt(eps);
        } catch (const OverflowSignal&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    switch (form_) {
        case Form::SeparableSum: {
            double s = 0.0;
            for (const auto& t : terms_) s += coefAt(t.coef) * t.profile(x);
            return s;
        }
        case Form::ScaledKernel:
            return coefAt(scaleOut_) * kernel()(coefAt(scaleIn_) * (x - shift_));
        case Form::BlackBox:
            return eval_(eps, x);
    }
    throw ArgumentError("unknown family form");
}

namespace {

Net gridMaxNet(const SmoothFamily& fam, double lo, double hi, const IndexSet& index,
               const std::string& label) {
    return Net::callable(
        [fam, lo, hi](double eps) {
            double best = 0.0;
            const int N = 400;
            for (int i = 0; i <= N; ++i) {
                double x = (lo == hi) ? lo : lo + (hi - lo) * i / N;
                double v = std::abs(fam.eval(eps, x));
                if (std::isfinite(v) && v > best) best = v;
                if (lo == hi) break;
            }
            return best;
        },
        label, index);
}

std::string windowText(double lo, double hi) {
    std::ostringstream os;
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

}  // namespace

Net SmoothFamily::supNorm(double lo, double hi, int alpha, const IndexSet& index) const {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ArgumentError("sup-norm window must be a finite closed interval");
    if (alpha < 0) throw ArgumentError("derivative order must be >= 0");
    if (alpha > derivBudget())
        throw CapabilityError("derivative order " + std::to_string(alpha) +
                              " exceeds the black-box budget of " + std::to_string(derivBudget_));

    SmoothFamily d = *this;
    for (int i = 0; i < alpha; ++i) d = d.derivative();

    const std::string label = "sup|d^" + std::to_string(alpha) + " " + describe() + "| on " +
                              windowText(lo, hi);

    switch (d.form_) {
        case Form::SeparableSum: {
            std::vector<RateExpr> parts;
            for (const auto& t : d.terms_) {
                double m = t.profile.maxAbsOn(lo, hi);
                if (m == 0.0) continue;
                if (!std::isfinite(m))
                    throw NumericError("profile maximum overflows on " + windowText(lo, hi));
                parts.push_back(rx::mul(rx::absv(t.coef), rx::num(m)));
            }
            if (parts.empty()) return Net::zero(index);
            return Net::symbolic(parts.size() == 1 ? parts.front() : rx::add(parts), index);
        }

        case Form::ScaledKernel: {
            const SmoothProfile& k = d.kernel();
            auto nfs = tryNF(d.scaleIn_);
            bool unboundedIn = false;
            int sgn = 0;
            if (nfs && !nfs->isZero()) {
                auto lim = nfs->limit();
                unboundedIn = lim.kind != NormalForm::Limit::Kind::Finite;
                sgn = nfs->eventualSign();
            }
            if (!unboundedIn || sgn == 0) return gridMaxNet(d, lo, hi, index, label);

            // The kernel argument sweeps scaleIn * ([lo, hi] - shift); once that
            // window is unbounded the supremum sits either at a fixed kernel
            // feature (bounded kernels whose peak the window engulfs) or at the
            // window endpoint nearest / farthest from it (decaying / growing
            // kernels), and both cases stay inside the symbolic fragment.
            auto finish = [&](const RateExpr& valueExpr) {
                return Net::symbolic(rx::mul(rx::absv(d.scaleOut_), valueExpr), index);
            };
            const bool shiftInside = (d.shift_ >= lo && d.shift_ <= hi);
            const double dLo = lo - d.shift_, dHi = hi - d.shift_;
            switch (k.kind()) {
                case SmoothProfile::Kind::Trig:
                    if (polyIsConst(k.mainPoly()) && polyIsConst(k.cosPoly()))
                        return finish(rx::num(k.maxAbsOn(-3.2, 3.2)));
                    return gridMaxNet(d, lo, hi, index, label);
                case SmoothProfile::Kind::Gauss: {
                    if (shiftInside) return finish(rx::num(k.maxAbsOn(-12.0, 12.0)));
                    double d0 = (d.shift_ < lo) ? dLo : dHi;  // nearest endpoint offset
                    RateExpr arg = rx::mul(d.scaleIn_, rx::numOrRational(d0));
                    return finish(rx::mul(rx::absv(polyAtExpr(k.mainPoly(), arg)),
                                          rx::exp(rx::neg(rx::pow(arg, Rational(2))))));
                }
                case SmoothProfile::Kind::Bump:
                    if (shiftInside) return finish(rx::num(k.maxAbsOn(-1.0, 1.0)));
                    // Window slides past the compact support; keep honest finite
                    // eps values, the tail is eventually exactly zero.
                    return gridMaxNet(d, lo, hi, index, label);
                case SmoothProfile::Kind::Poly: {
                    if (polyIsConst(k.mainPoly()))
                        return finish(rx::num(std::abs(
                            k.mainPoly().empty() ? 0.0 : k.mainPoly()[0])));
                    double d0 = (std::abs(dLo) >= std::abs(dHi)) ? dLo : dHi;
                    if (d0 == 0.0) return finish(rx::num(std::abs(k(0.0))));
                    RateExpr arg = rx::mul(d.scaleIn_, rx::numOrRational(d0));
                    return finish(rx::absv(polyAtExpr(k.mainPoly(), arg)));
                }
                case SmoothProfile::Kind::Exp: {
                    double d0 = (sgn > 0) ? dHi : dLo;  // endpoint with largest argument
                    RateExpr arg = rx::mul(d.scaleIn_, rx::numOrRational(d0));
                    return finish(rx::mul(rx::absv(polyAtExpr(k.mainPoly(), arg)), rx::exp(arg)));
                }
            }
            return gridMaxNet(d, lo, hi, index, label);
        }

        case Form::BlackBox: {
            auto eps = gridPoints(index, GridSpec{});
            std::vector<double> es, vs;
            for (double e : eps) {
                double best = 0.0;
                bool ok = true;
                const int N = 400;
                for (int i = 0; i <= N; ++i) {
                    double x = (lo == hi) ? lo : lo + (hi - lo) * i / N;
                    double v = std::abs(d.eval(e, x));
                    if (!std::isfinite(v)) {
                        ok = false;
                        break;
                    }
                    if (v > best) best = v;
                    if (lo == hi) break;
                }
                if (!ok) break;
                es.push_back(e);
                vs.push_back(best);
            }
            if (es.size() >= 8) return Net::sampled(es, vs, index);
            return gridMaxNet(d, lo, hi, index, label);
        }
    }
    throw ArgumentError("unknown family form");
}

std::string SmoothFamily::describe() const {
    switch (form_) {
        case Form::SeparableSum: {
            if (terms_.empty()) return "sep[0]";
            std::ostringstream os;
            os << "sep[";
            for (std::size_t i = 0; i < terms_.size(); ++i) {
                if (i) os << " + ";
                os << "(" << terms_[i].coef.str() << ") * " << terms_[i].profile.describe();
            }
            os << "]";
            return os.str();
        }
        case Form::ScaledKernel: {
            std::ostringstream os;
            os << "kernel(" << kernel().describe() << ", in=" << scaleIn_.str()
               << ", out=" << scaleOut_.str() << ", shift=" << shift_ << ")";
            return os.str();
        }
        case Form::BlackBox:
            return "blackbox(" + label_ + ")";
    }
    return "family";
}

// --- family algebra ----------------------------------------------------

namespace {

// Families combine exactly where the closed forms allow, otherwise fall back
// to a black box with the smaller derivative budget.
SmoothFamily boxCombine(const SmoothFamily& a, const SmoothFamily& b, bool product) {
    int budget = std::min(a.derivBudget(), b.derivBudget());
    auto fa = a, fb = b;
    if (product)
        return SmoothFamily::blackBox(
            [fa, fb](double eps, double x) { return fa.eval(eps, x) * fb.eval(eps, x); }, budget,
            "product");
    return SmoothFamily::blackBox(
        [fa, fb](double eps, double x) { return fa.eval(eps, x) + fb.eval(eps, x); }, budget,
        "sum");
}

// A separable family whose profiles are all constants is just an eps-number;
// such factors fold into coefficients exactly.
std::optional<RateExpr> constantValueExpr(const SmoothFamily& f) {
    if (f.form() != SmoothFamily::Form::SeparableSum) return std::nullopt;
    std::vector<RateExpr> parts;
    for (const auto& t : f.terms()) {
        if (t.profile.kind() != SmoothProfile::Kind::Poly) return std::nullopt;
        const auto& p = t.profile.mainPoly();
        for (std::size_t k = 1; k < p.size(); ++k)
            if (p[k] != 0.0) return std::nullopt;
        double c = p.empty() ? 0.0 : p[0];
        if (c == 0.0) continue;
        parts.push_back(c == 1.0 ? t.coef : rx::mul(t.coef, rx::num(c)));
    }
    if (parts.empty()) return rx::lit(0);
    return parts.size() == 1 ? parts.front() : rx::add(parts);
}

std::optional<SmoothProfile> profileProduct(const SmoothProfile& a, const SmoothProfile& b) {
    if (a.kind() == SmoothProfile::Kind::Poly) return b.timesPoly(a.mainPoly());
    if (b.kind() == SmoothProfile::Kind::Poly) return a.timesPoly(b.mainPoly());
    return std::nullopt;
}

}  // namespace

SmoothFamily scaleFamily(const SmoothFamily& f, const RateExpr& c) {
    using Form = SmoothFamily::Form;
    switch (f.form()) {
        case Form::SeparableSum: {
            std::vector<SmoothFamily::Term> terms;
            for (const auto& t : f.terms())
                terms.push_back(SmoothFamily::Term{rx::mul(c, t.coef), t.profile});
            return SmoothFamily::separable(std::move(terms));
        }
        case Form::ScaledKernel:
            return SmoothFamily::scaledKernel(f.kernel(), f.scaleIn(),
                                              rx::mul(c, f.scaleOut()), f.shift());
        case Form::BlackBox: {
            auto base = f;
            return SmoothFamily::blackBox(
                [base, c](double eps, double x) { return c.evalAt(eps) * base.eval(eps, x); },
                f.derivBudget(), "scaled");
        }
    }
    return f;
}

SmoothFamily famAdd(const SmoothFamily& a, const SmoothFamily& b) {
    using Form = SmoothFamily::Form;
    if (a.form() == Form::SeparableSum && a.terms().empty()) return b;
    if (b.form() == Form::SeparableSum && b.terms().empty()) return a;
    if (a.form() == Form::SeparableSum && b.form() == Form::SeparableSum) {
        // Merge terms sharing a profile, so cancellations stay visible to the
        // symbolic sup-norm (which otherwise adds magnitudes termwise).
        auto terms = a.terms();
        for (const auto& t : b.terms()) {
            bool merged = false;
            for (auto& u : terms)
                if (u.profile.sameAs(t.profile)) {
                    u.coef = rx::add(u.coef, t.coef);
                    merged = true;
                    break;
                }
            if (!merged) terms.push_back(t);
        }
        return SmoothFamily::separable(std::move(terms));
    }
    return boxCombine(a, b, false);
}

SmoothFamily famMul(const SmoothFamily& a, const SmoothFamily& b) {
    using Form = SmoothFamily::Form;
    if ((a.form() == Form::SeparableSum && a.terms().empty()) ||
        (b.form() == Form::SeparableSum && b.terms().empty()))
        return SmoothFamily::zero();
    if (auto ca = constantValueExpr(a)) return scaleFamily(b, *ca);
    if (auto cb = constantValueExpr(b)) return scaleFamily(a, *cb);
    if (a.form() == Form::SeparableSum && b.form() == Form::SeparableSum) {
        std::vector<SmoothFamily::Term> terms;
        bool closed = true;
        for (const auto& ta : a.terms()) {
            for (const auto& tb : b.terms()) {
                auto p = profileProduct(ta.profile, tb.profile);
                if (!p) {
                    closed = false;
                    break;
                }
                terms.push_back(SmoothFamily::Term{rx::mul(ta.coef, tb.coef), *p});
            }
            if (!closed) break;
        }
        if (closed) return SmoothFamily::separable(std::move(terms));
    }
    return boxCombine(a, b, true);
}

}  // namespace agcal
