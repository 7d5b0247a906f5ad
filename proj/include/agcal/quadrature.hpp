#pragma once

#include <functional>

namespace agcal {

// Adaptive Gauss-Kronrod (7-15) integration with bisection refinement.
// Deterministic: fixed node tables, left-to-right recursion.
struct QuadOptions {
    double absTol = 1e-10;
    int maxDepth = 48;
};

// Integral of f over [a, b]; throws NumericError with the achieved error
// estimate when refinement cannot reach the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

}  // namespace agcal
