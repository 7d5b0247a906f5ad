#pragma once

#include <functional>

#include "agcal/net.hpp"
#include "agcal/verdict.hpp"

namespace agcal {

// Default numeric policy: geometric grid, bound fitted with 5% headroom over
// the tail, and a numeric Fails only on a sustained monotone violation.
struct NumericOptions {
    GridSpec grid;
    int tailPoints = 25;
    double padFactor = 1.05;
    int minViolationRun = 10;
    int naturalsBudget = 200;
};

// Does pred hold for all indices close enough to the limit? The predicate
// receives eps for interval-like indices and n for the naturals. budget
// bounds the number of probes; must be positive.
Verdict eventually(const IndexSet& index, const std::function<bool(double)>& pred,
                   int budget = 400);

// |x_eps| <= H |y_eps| near the limit. Exact on symbolic pairs inside the
// fragment, fitted on a common grid otherwise.
Verdict bigO(const Net& x, const Net& y, const NumericOptions& opt = {});

// x_eps > y_eps eventually (strict pointwise order toward the limit).
Verdict orderGt(const Net& x, const Net& y, const NumericOptions& opt = {});

LimitValue limitOf(const Net& f, const NumericOptions& opt = {});

// Shared helper: evaluation of a net over a grid, truncated at the first
// overflow / undefined point. Values arrive ordered toward the limit.
struct GridTrace {
    std::vector<double> eps;
    std::vector<double> value;
    bool truncated = false;
    std::string truncationReason;
};
GridTrace traceNet(const Net& n, const std::vector<double>& pts);

// Least-squares slope of log|y| against log(x) over matched arrays; used by
// growth fits. Returns 0 for degenerate input.
double logLogSlope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace agcal
