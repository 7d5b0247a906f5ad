#include "agcal/net.hpp"

#include <cmath>

#include "agcal/errors.hpp"
#include "agcal/parser.hpp"

namespace agcal {

Net Net::symbolic(const RateExpr& e, IndexSet index) {
    if (!e.valid()) throw ArgumentError("empty expression for a symbolic net");
    Net n;
    n.rep_ = Rep::Symbolic;
    n.index_ = std::move(index);
    n.expr_ = e;
    return n;
}

Net Net::symbolic(const std::string& text, IndexSet index) {
    return symbolic(parse(text), std::move(index));
}

Net Net::sampled(std::vector<double> eps, std::vector<double> values, IndexSet index) {
    if (eps.size() != values.size()) throw ArgumentError("sample arrays differ in length");
    if (eps.size() < 8) throw ArgumentError("sampled net needs at least 8 points");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ArgumentError("sample points must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw ArgumentError("sample points must decrease strictly");
    }
    Net n;
    n.rep_ = Rep::Sampled;
    n.index_ = std::move(index);
    n.sampleEps_ = std::move(eps);
    n.sampleVal_ = std::move(values);
    return n;
}

Net Net::callable(std::function<double(double)> fn, std::string label, IndexSet index) {
    if (!fn) throw ArgumentError("empty callable for a net");
    Net n;
    n.rep_ = Rep::Callable;
    n.index_ = std::move(index);
    n.fn_ = std::move(fn);
    n.label_ = std::move(label);
    return n;
}

Net Net::zero(IndexSet index) { return symbolic(rx::lit(0), std::move(index)); }

const RateExpr& Net::expr() const {
    if (rep_ != Rep::Symbolic) throw ArgumentError("net has no symbolic form");
    return expr_;
}

double Net::at(double eps) const {
    switch (rep_) {
        case Rep::Symbolic:
            if (index_.kind == IndexSet::Kind::Composed) {
                const double s = index_.scale.evalAt(eps);
                if (!(s > 0.0) || s > 1.0)
                    throw NumericError("composed scale left (0,1] at this eps");
                return expr_.evalAt(s);
            }
            return expr_.evalAt(eps);
        case Rep::Callable:
            if (index_.kind == IndexSet::Kind::NaturalsFrechet) return fn_(std::round(1.0 / eps));
            return fn_(eps);
        case Rep::Sampled: {
            // Exact hit or log-log interpolation inside the sampled range.
            const auto& xs = sampleEps_;
            if (eps > xs.front() * (1 + 1e-12) || eps < xs.back() * (1 - 1e-12))
                throw NumericError("point outside the sampled range");
            std::size_t lo = 0;
            std::size_t hi = xs.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (xs[mid] >= eps ? lo : hi) = mid;
            }
            if (std::fabs(xs[lo] - eps) <= 1e-12 * eps) return sampleVal_[lo];
            if (std::fabs(xs[hi] - eps) <= 1e-12 * eps) return sampleVal_[hi];
            const double va = sampleVal_[lo];
            const double vb = sampleVal_[hi];
            const double t = (std::log(eps) - std::log(xs[lo])) /
                             (std::log(xs[hi]) - std::log(xs[lo]));
            // Interpolate magnitudes geometrically when signs allow it.
            if (va > 0.0 && vb > 0.0) return std::exp((1 - t) * std::log(va) + t * std::log(vb));
            if (va < 0.0 && vb < 0.0)
                return -std::exp((1 - t) * std::log(-va) + t * std::log(-vb));
            return (1 - t) * va + t * vb;
        }
    }
    throw ArgumentError("corrupt net");
}

std::optional<NormalForm> Net::normalForm() const {
    if (rep_ != Rep::Symbolic) return std::nullopt;
    if (index_.kind == IndexSet::Kind::Composed)
        return normalize(rx::comp(expr_, index_.scale));
    return normalize(expr_);
}

std::string Net::describe() const {
    switch (rep_) {
        case Rep::Symbolic: return expr_.str();
        case Rep::Sampled: return "sampled[" + std::to_string(sampleEps_.size()) + "]";
        case Rep::Callable: return label_;
    }
    return "?";
}

namespace {

Net combine(const Net& a, const Net& b, RateExpr (*symbolicOp)(const RateExpr&, const RateExpr&),
            double (*numericOp)(double, double), const char* opName) {
    if (!a.index().same(b.index()))
        throw ArgumentError(std::string("mixed index sets in ") + opName);
    if (a.isSymbolic() && b.isSymbolic())
        return Net::symbolic(symbolicOp(a.expr(), b.expr()), a.index());
    Net ca = a;
    Net cb = b;
    return Net::callable(
        [ca, cb, numericOp](double eps) { return numericOp(ca.at(eps), cb.at(eps)); },
        a.describe() + " " + opName + " " + b.describe(), a.index());
}

} // namespace

Net Net::operator-() const {
    if (isSymbolic()) return symbolic(rx::neg(expr_), index_);
    Net c = *this;
    return callable([c](double eps) { return -c.at(eps); }, "-" + describe(), index_);
}

Net Net::absNet() const {
    if (isSymbolic()) return symbolic(rx::absv(expr_), index_);
    Net c = *this;
    return callable([c](double eps) { return std::fabs(c.at(eps)); }, "abs(" + describe() + ")",
                    index_);
}

Net operator+(const Net& a, const Net& b) {
    return combine(
        a, b, +[](const RateExpr& x, const RateExpr& y) { return rx::add(x, y); },
        +[](double x, double y) { return x + y; }, "+");
}

Net operator-(const Net& a, const Net& b) {
    return combine(
        a, b, +[](const RateExpr& x, const RateExpr& y) { return rx::sub(x, y); },
        +[](double x, double y) { return x - y; }, "-");
}

Net operator*(const Net& a, const Net& b) {
    return combine(
        a, b, +[](const RateExpr& x, const RateExpr& y) { return rx::mul(x, y); },
        +[](double x, double y) { return x * y; }, "*");
}

Net Net::composedWith(const RateExpr& scale) const {
    if (isSymbolic() && index_.kind == IndexSet::Kind::HalfOpenUnit)
        return symbolic(expr_, IndexSet::composed(scale));
    const Net base = *this;
    return callable([base, scale](double eps) { return base.at(scale.evalAt(eps)); },
                    "comp(" + describe() + ", " + scale.str() + ")",
                    IndexSet::halfOpenUnit());
}

std::vector<double> gridPoints(const IndexSet& index, const GridSpec& grid, int naturalsBudget) {
    std::vector<double> pts;
    if (index.kind == IndexSet::Kind::NaturalsFrechet) {
        pts.reserve(naturalsBudget);
        for (int n = 1; n <= naturalsBudget; ++n) pts.push_back(1.0 / n);
        return pts;
    }
    pts.reserve(grid.points);
    double e = grid.eps0;
    for (int j = 0; j < grid.points; ++j) {
        pts.push_back(e);
        e *= grid.ratio;
    }
    return pts;
}

} // namespace agcal
