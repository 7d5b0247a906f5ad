#include "agcal/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

double clampConf(double c) { return std::min(0.95, std::max(0.05, c)); }

// Moderate grid used for counterexample reporting: values stay printable.
std::vector<double> reportGrid(const IndexSet& index, const NumericOptions& opt) {
    if (index.kind == IndexSet::Kind::NaturalsFrechet)
        return gridPoints(index, opt.grid, opt.naturalsBudget);
    std::vector<double> pts;
    const double floor =
        opt.grid.eps0 * std::pow(opt.grid.ratio, std::max(0, opt.grid.points - 1));
    double e = 1.0;
    while (e >= floor && pts.size() < 4096) {
        pts.push_back(e);
        e *= opt.grid.ratio;
    }
    return pts;
}

// Deep grid for witness certification: four points per decade down to the
// edge of double range. Exact relations hold from some threshold on, but the
// threshold itself can sit far below any casual grid.
std::vector<double> deepGrid(const IndexSet& index, int naturalsBudget) {
    if (index.kind == IndexSet::Kind::NaturalsFrechet)
        return gridPoints(index, GridSpec{}, naturalsBudget);
    std::vector<double> pts;
    const double step = std::pow(0.1, 0.25);
    double e = 1.0;
    while (e > 1e-250 && pts.size() < 2200) {
        pts.push_back(e);
        e *= step;
    }
    return pts;
}

struct PairTrace {
    std::vector<double> eps, ax, ay;
    bool truncated = false; // trailing points lost to overflow
};

// Joint |x|,|y| trace. Isolated failures (head singularities, undefined
// points) are skipped; only overflow that persists to the end of the grid
// counts as truncation toward the limit.
PairTrace tracePairAbs(const Net& x, const Net& y, const std::vector<double>& pts) {
    PairTrace t;
    bool pendingOverflow = false;
    for (double e : pts) {
        try {
            const double vx = std::fabs(x.at(e));
            const double vy = std::fabs(y.at(e));
            if (std::isnan(vx) || std::isnan(vy)) continue;
            t.eps.push_back(e);
            t.ax.push_back(vx);
            t.ay.push_back(vy);
            pendingOverflow = false;
        } catch (const OverflowSignal&) {
            pendingOverflow = true;
        } catch (const NumericError&) {
            continue;
        } catch (const ArgumentError&) {
            continue;
        }
    }
    t.truncated = pendingOverflow;
    return t;
}

struct RatioFit {
    bool any = false;       // at least one usable ratio
    double maxRatio = 0.0;
    bool cleanUnit = true;  // ratio never exceeded 1
    bool peaked = false;    // maximum attained away from the scan floor
};

RatioFit scanRatios(const Net& x, const Net& y, const IndexSet& index, int naturalsBudget) {
    const PairTrace t = tracePairAbs(x, y, deepGrid(index, naturalsBudget));
    RatioFit f;
    std::size_t argmax = 0, count = 0;
    for (std::size_t i = 0; i < t.eps.size(); ++i) {
        if (t.ay[i] == 0.0) continue;
        const double r = t.ax[i] / t.ay[i];
        if (!f.any || r > f.maxRatio) {
            f.maxRatio = r;
            argmax = count;
        }
        if (r > 1.0 + 1e-12) f.cleanUnit = false;
        f.any = true;
        ++count;
    }
    f.peaked = f.any && argmax + 4 < count;
    return f;
}

std::vector<double> tailCounterexample(const Net& x, const Net& y, const IndexSet& index,
                                       const NumericOptions& opt) {
    const PairTrace t = tracePairAbs(x, y, reportGrid(index, opt));
    std::vector<double> cex;
    for (std::size_t i = t.eps.size(); i-- > 0 && cex.size() < 8;) cex.push_back(t.eps[i]);
    std::sort(cex.rbegin(), cex.rend());
    return cex;
}

Verdict bigOExact(const Net& x, const Net& y, const NormalForm& nx, const NormalForm& ny,
                  const NumericOptions& opt) {
    const OrderRel rel = compare_O(nx, ny);
    if (rel == OrderRel::YbigOofX)
        return Verdict::failsExact(tailCounterexample(x, y, x.index(), opt),
                                   "growth class strictly exceeds the bound");

    Witness w;
    w.eps0 = 1.0;
    std::string note;

    // Same class with a single exact term on both sides: the ratio is a
    // constant and the witness is sharp.
    if (rel == OrderRel::Both && nx.terms.size() == 1 && ny.terms.size() == 1 &&
        nx.dominantExact && ny.dominantExact && nx.dominant().w == ny.dominant().w &&
        nx.dominant().hyperExp == ny.dominant().hyperExp) {
        w.boundConstant = std::fabs(nx.dominantApprox) / std::fabs(ny.dominantApprox);
        w.boundExact = true;
        return Verdict::holdsExact(w, "same class, constant ratio");
    }
    if (nx.isZero()) {
        w.boundConstant = 1.0;
        w.boundExact = true;
        return Verdict::holdsExact(w, "zero net");
    }

    const RatioFit fit = scanRatios(x, y, x.index(), opt.naturalsBudget);
    if (!fit.any) {
        w.boundConstant = rel == OrderRel::XbigOofY
                              ? 1.0
                              : opt.padFactor * std::fabs(nx.dominantApprox) /
                                    std::fabs(ny.dominantApprox);
        w.boundExact = false;
        return Verdict::holdsExact(w, "no numerically representable scan points");
    }
    if (rel == OrderRel::XbigOofY && fit.cleanUnit) {
        w.boundConstant = 1.0;
        w.boundExact = true;
        return Verdict::holdsExact(w, "strictly dominated");
    }
    w.boundConstant = (fit.peaked ? opt.padFactor : 4.0) * std::max(fit.maxRatio, 1e-300);
    w.boundExact = false;
    note = rel == OrderRel::XbigOofY ? "strictly dominated, constant fitted by deep scan"
                                     : "same class, constant fitted by deep scan";
    if (!fit.peaked) note += "; ratio still rising at the scan floor";
    return Verdict::holdsExact(w, std::move(note));
}

Verdict bigONumeric(const Net& x, const Net& y, const NumericOptions& opt) {
    const auto pts = gridPoints(x.index(), opt.grid, opt.naturalsBudget);
    const PairTrace t = tracePairAbs(x, y, pts);
    const std::size_t n = t.eps.size();
    if (n < 12)
        return Verdict::inconclusive("too few usable grid points (" + std::to_string(n) + ")");

    const std::size_t tailLen = std::min<std::size_t>(opt.tailPoints, (n * 2) / 3);
    const std::size_t start = n - tailLen;

    std::vector<double> te, tr;
    bool unboundedPoint = false;
    for (std::size_t i = start; i < n; ++i) {
        if (t.ay[i] == 0.0) {
            if (t.ax[i] != 0.0) unboundedPoint = true;
            continue;
        }
        te.push_back(t.eps[i]);
        tr.push_back(t.ax[i] / t.ay[i]);
    }
    if (te.size() < 8) return Verdict::inconclusive("tail too short after removing zero points");

    // Growth of the ratio toward the limit; positive slope means violation.
    std::vector<double> inv(te.size());
    for (std::size_t i = 0; i < te.size(); ++i) inv[i] = 1.0 / te[i];
    const double slope = logLogSlope(inv, tr);

    std::size_t bestRun = 0, run = 0, runEnd = 0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        if (tr[i] > tr[i - 1] * (1 + 1e-12)) {
            if (++run >= bestRun) {
                bestRun = run;
                runEnd = i;
            }
        } else {
            run = 0;
        }
    }
    const double growthFactor =
        (tr.front() > 0 && tr.back() > 0) ? tr.back() / tr.front() : 1.0;

    const bool violating = slope > 0.05 &&
                           bestRun + 1 >= static_cast<std::size_t>(opt.minViolationRun) &&
                           growthFactor > 3.0;
    if (violating) {
        std::vector<double> cex;
        for (std::size_t i = runEnd + 1; i-- > 0 && cex.size() < 8;) cex.push_back(te[i]);
        std::sort(cex.rbegin(), cex.rend());
        const double conf = clampConf(0.5 + 0.1 * std::log10(std::max(1.0, growthFactor)));
        return Verdict::failsNumeric(std::move(cex), conf,
                                     "ratio grows monotonically over the tail");
    }
    if (slope <= 0.05 && !unboundedPoint) {
        const double mx = *std::max_element(tr.begin(), tr.end());
        Witness w;
        w.boundConstant = mx > 0 ? opt.padFactor * mx : 1.0;
        w.eps0 = te.front();
        w.boundExact = false;
        std::string note = "bound fitted over the grid tail";
        if (t.truncated) note += "; grid truncated at overflow";
        return Verdict::holdsNumeric(w, clampConf(0.9 - 4.0 * std::max(0.0, slope)),
                                     std::move(note));
    }
    return Verdict::inconclusive("ratio trend is unstable over the tail", 0.25);
}

} // namespace

GridTrace traceNet(const Net& n, const std::vector<double>& pts) {
    GridTrace t;
    bool pendingOverflow = false;
    std::string reason;
    for (double e : pts) {
        try {
            const double v = n.at(e);
            if (std::isnan(v)) continue;
            t.eps.push_back(e);
            t.value.push_back(v);
            pendingOverflow = false;
        } catch (const OverflowSignal& ex) {
            pendingOverflow = true;
            reason = ex.what();
        } catch (const NumericError&) {
            continue;
        } catch (const ArgumentError&) {
            continue;
        }
    }
    if (pendingOverflow) {
        t.truncated = true;
        t.truncationReason = reason;
    }
    return t;
}

double logLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0.0;
    const double d = m * sxx - sx * sx;
    if (d == 0.0) return 0.0;
    return (m * sxy - sx * sy) / d;
}

Verdict eventually(const IndexSet& index, const std::function<bool(double)>& pred, int budget) {
    if (budget <= 0) throw ArgumentError("eventually requires a positive budget");
    if (!pred) throw ArgumentError("eventually requires a predicate");

    const bool naturals = index.kind == IndexSet::Kind::NaturalsFrechet;
    std::vector<double> pts;
    if (naturals) {
        for (int k = 1; k <= budget; ++k) pts.push_back(k);
    } else {
        const double ratio = std::pow(1e-9, 1.0 / budget);
        double e = 1.0;
        for (int k = 0; k < budget; ++k) {
            pts.push_back(e);
            e *= ratio;
        }
    }

    std::vector<char> ok(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ok[i] = pred(pts[i]) ? 1 : 0;

    std::ptrdiff_t lastFalse = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!ok[i]) lastFalse = static_cast<std::ptrdiff_t>(i);

    if (lastFalse < 0) {
        Witness w;
        w.boundConstant = 1.0;
        w.eps0 = 1.0;
        return Verdict::holdsNumeric(w, 0.85,
                                     naturals ? "holds from n = 1 over the whole budget"
                                              : "holds on every probe down to the grid floor");
    }

    const std::size_t cleanSuffix = pts.size() - 1 - static_cast<std::size_t>(lastFalse);
    const std::size_t needSuffix = std::max<std::size_t>(10, pts.size() / 8);

    if (cleanSuffix >= needSuffix) {
        Witness w;
        w.boundConstant = 1.0;
        if (naturals) {
            w.eps0 = pts[lastFalse] + 1; // threshold index
            return Verdict::holdsNumeric(w, 0.8, "holds from this n on (threshold in eps0)");
        }
        // Refine the boundary between the last failure and the next good
        // point, assuming a threshold-like predicate.
        double bad = pts[lastFalse];
        double good = pts[lastFalse + 1];
        for (int it = 0; it < 60; ++it) {
            const double mid = std::sqrt(bad * good);
            (pred(mid) ? good : bad) = mid;
        }
        w.eps0 = good;
        return Verdict::holdsNumeric(w, 0.8, "boundary refined by bisection");
    }

    // Failures persist near the limit.
    std::vector<double> falsePts;
    for (std::size_t i = pts.size() / 2; i < pts.size(); ++i)
        if (!ok[i]) falsePts.push_back(pts[i]);
    if (falsePts.size() >= 3) {
        if (!naturals) std::sort(falsePts.rbegin(), falsePts.rend());
        if (falsePts.size() > 8)
            falsePts.erase(falsePts.begin(), falsePts.end() - 8);
        return Verdict::failsNumeric(std::move(falsePts), 0.8,
                                     "counterexamples persist arbitrarily close to the limit");
    }
    return Verdict::inconclusive("sparse failures near the limit", 0.3);
}

Verdict bigO(const Net& x, const Net& y, const NumericOptions& opt) {
    if (!x.index().same(y.index())) throw ArgumentError("bigO across different index sets");
    try {
        const auto nx = x.normalForm();
        const auto ny = y.normalForm();
        if (nx && ny) return bigOExact(x, y, *nx, *ny, opt);
    } catch (const FragmentError&) {
        // outside the fragment: fall through to the fitted path
    }
    return bigONumeric(x, y, opt);
}

Verdict orderGt(const Net& x, const Net& y, const NumericOptions& opt) {
    if (!x.index().same(y.index())) throw ArgumentError("orderGt across different index sets");
    const Net d = x - y;
    try {
        if (const auto nd = d.normalForm()) {
            if (nd->isZero()) {
                auto pts = reportGrid(x.index(), opt);
                pts.resize(std::min<std::size_t>(4, pts.size()));
                return Verdict::failsExact(std::move(pts), "nets coincide at every index");
            }
            const int s = nd->eventualSign();
            if (s > 0) {
                Witness w;
                w.boundConstant = 1.0;
                w.boundExact = true;
                // Largest scanned threshold from which the difference stays
                // positive on the deep grid.
                const GridTrace t = traceNet(d, deepGrid(x.index(), opt.naturalsBudget));
                std::ptrdiff_t firstOk = static_cast<std::ptrdiff_t>(t.eps.size());
                for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(t.eps.size()) - 1; i >= 0;
                     --i) {
                    if (!(t.value[i] > 0.0)) break;
                    firstOk = i;
                }
                std::string note = "difference is eventually positive";
                if (t.eps.empty()) {
                    w.eps0 = 1.0;
                    note += "; no representable scan points";
                } else if (firstOk == 0) {
                    w.eps0 = 1.0;
                } else if (firstOk == static_cast<std::ptrdiff_t>(t.eps.size())) {
                    w.eps0 = t.eps.back();
                    note += "; sign change below the scan floor";
                } else {
                    w.eps0 = t.eps[firstOk];
                }
                return Verdict::holdsExact(w, std::move(note));
            }
            return Verdict::failsExact(tailCounterexample(d, Net::zero(x.index()), x.index(), opt),
                                       "difference is eventually non-positive");
        }
    } catch (const FragmentError&) {
        // fall through
    }

    const auto pts = gridPoints(x.index(), opt.grid, opt.naturalsBudget);
    const GridTrace t = traceNet(d, pts);
    if (t.eps.size() < 12) return Verdict::inconclusive("too few usable grid points");
    const std::size_t tailLen = std::min<std::size_t>(opt.tailPoints, (t.eps.size() * 2) / 3);
    std::size_t pos = 0, nonpos = 0;
    for (std::size_t i = t.eps.size() - tailLen; i < t.eps.size(); ++i)
        (t.value[i] > 0.0 ? pos : nonpos) += 1;
    if (nonpos == 0) {
        Witness w;
        w.boundConstant = 1.0;
        w.eps0 = t.eps[t.eps.size() - tailLen];
        return Verdict::holdsNumeric(w, 0.8, "difference positive across the tail");
    }
    if (pos == 0) {
        std::vector<double> cex;
        for (std::size_t i = t.eps.size(); i-- > t.eps.size() - tailLen && cex.size() < 8;)
            cex.push_back(t.eps[i]);
        std::sort(cex.rbegin(), cex.rend());
        return Verdict::failsNumeric(std::move(cex), 0.8, "difference non-positive across the tail");
    }
    return Verdict::inconclusive("sign oscillates over the tail", 0.2);
}

LimitValue limitOf(const Net& f, const NumericOptions& opt) {
    try {
        if (const auto nf = f.normalForm()) {
            const auto lim = nf->limit();
            LimitValue lv;
            lv.mode = Mode::Exact;
            lv.confidence = 1.0;
            switch (lim.kind) {
                case NormalForm::Limit::Kind::Finite:
                    lv.kind = LimitValue::Kind::Finite;
                    lv.value = lim.value;
                    lv.exact = lim.exact;
                    break;
                case NormalForm::Limit::Kind::PlusInf:
                    lv.kind = LimitValue::Kind::PlusInf;
                    break;
                case NormalForm::Limit::Kind::MinusInf:
                    lv.kind = LimitValue::Kind::MinusInf;
                    break;
            }
            return lv;
        }
    } catch (const FragmentError&) {
        // fall through
    }

    const auto pts = gridPoints(f.index(), opt.grid, opt.naturalsBudget);
    const GridTrace t = traceNet(f, pts);
    LimitValue lv;
    if (t.eps.size() < 10) {
        if (t.truncated) {
            // Values escaped double range on the way toward the limit.
            bool sawNeg = false, sawPos = false;
            for (double v : t.value) (v < 0 ? sawNeg : sawPos) = true;
            lv.kind = (sawNeg && sawPos) ? LimitValue::Kind::UnsignedInf
                      : (sawNeg ? LimitValue::Kind::MinusInf : LimitValue::Kind::PlusInf);
            lv.confidence = 0.6;
            lv.note = "diverged past double range";
            return lv;
        }
        lv.note = "too few usable grid points";
        return lv;
    }

    const std::size_t n = t.eps.size();
    const std::size_t tailLen = std::min<std::size_t>(12, n / 2);
    std::vector<double> tv(t.value.end() - tailLen, t.value.end());

    std::size_t straightGrowth = 0;
    for (std::size_t i = 1; i < tv.size(); ++i)
        if (std::fabs(tv[i]) > std::fabs(tv[i - 1]) * (1 + 1e-12)) ++straightGrowth;
    const double first = std::fabs(tv.front());
    const double last = std::fabs(tv.back());
    if ((straightGrowth + 1 == tv.size() || t.truncated) && first > 0 &&
        (last > 100.0 * first || t.truncated)) {
        bool sawNeg = false, sawPos = false;
        for (double v : tv) (v < 0 ? sawNeg : sawPos) = true;
        lv.kind = (sawNeg && sawPos) ? LimitValue::Kind::UnsignedInf
                  : (sawNeg ? LimitValue::Kind::MinusInf : LimitValue::Kind::PlusInf);
        lv.confidence = 0.8;
        lv.note = "magnitude grows monotonically over the tail";
        return lv;
    }

    const auto [mn, mx] = std::minmax_element(tv.begin(), tv.end());
    double center = 0.0;
    for (std::size_t i = tv.size() - std::min<std::size_t>(5, tv.size()); i < tv.size(); ++i)
        center += tv[i];
    center /= std::min<std::size_t>(5, tv.size());
    if (*mx - *mn <= std::max(1e-9, 1e-6 * std::fabs(center))) {
        lv.kind = LimitValue::Kind::Finite;
        lv.value = center;
        lv.confidence = 0.85;
        lv.note = "tail settled";
        return lv;
    }
    lv.kind = LimitValue::Kind::None;
    lv.confidence = 0.2;
    lv.note = "no stable trend over the tail";
    return lv;
}

} // namespace agcal
