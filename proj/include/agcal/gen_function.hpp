#pragma once

#include <string>
#include <vector>

#include "agcal/asymptotics.hpp"
#include "agcal/gauge.hpp"
#include "agcal/gen_number.hpp"
#include "agcal/smooth.hpp"
#include "agcal/verdict.hpp"

namespace agcal {

struct ClosedInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// A generalized function on an open interval: a smooth family together with
// the algebra it is read in. Construction runs a quick moderateness check
// over the default compact/derivative budget and refuses families that do
// not certify, unless the caller explicitly opts into carrying an
// uncertified (failing or inconclusive) representative for diagnosis.
class GenFunction {
public:
    static GenFunction make(SmoothFamily family, AlgebraSpec spec, double lo, double hi,
                            bool allowUncertified = false);

    const SmoothFamily& family() const { return family_; }
    const AlgebraSpec& spec() const { return spec_; }
    double domainLo() const { return lo_; }
    double domainHi() const { return hi_; }
    const Verdict& moderationCertificate() const { return cert_; }

    double eval(double eps, double x) const { return family_.eval(eps, x); }
    std::string describe() const;

private:
    GenFunction(SmoothFamily f, AlgebraSpec s, double lo, double hi, Verdict cert)
        : family_(std::move(f)), spec_(std::move(s)), lo_(lo), hi_(hi), cert_(std::move(cert)) {}

    SmoothFamily family_;
    AlgebraSpec spec_;
    double lo_, hi_;
    Verdict cert_;
};

// Test budget: which compact windows, up to which derivative order, and (for
// negligibility) up to which reciprocal power of the principal generator.
struct FnBudget {
    std::vector<ClosedInterval> windows;
    int alphaMax = 4;
    int mMax = 8;
};

// The unit window clipped to the domain (or the middle third when the domain
// sits away from [-1, 1]).
FnBudget defaultBudget(const GenFunction& u);

// Moderateness: every sup-norm net up to order alphaMax on every window is
// dominated by some member of the growth family. The verdict mode is the
// weakest mode met along the way.
Verdict isModerateFn(const GenFunction& u, const std::vector<ClosedInterval>& windows,
                     int alphaMax);
Verdict isModerateFn(const GenFunction& u);

// Negligibility: sup-norm nets decay below every reciprocal power of the
// negligibility family's principal generator (truncated at mMax); families
// without a principal generator are checked member by member. The numeric
// options control the probing grid — families evaluated through quadrature
// have a noise floor, and probing far below it measures the instrument, not
// the function.
Verdict isNegligibleFn(const GenFunction& u, const std::vector<ClosedInterval>& windows,
                       int alphaMax, int mMax, const NumericOptions& opt = {});
Verdict isNegligibleFn(const GenFunction& u);

// Ring operations; operands must share spec and domain.
GenFunction gfAdd(const GenFunction& a, const GenFunction& b);
GenFunction gfMul(const GenFunction& a, const GenFunction& b);
GenFunction gfDeriv(const GenFunction& u);
GenFunction gfRestrict(const GenFunction& u, double lo, double hi);

// Value at a compactly supported generalized point; the confinement interval
// must sit inside the domain. Symbolic when the composition stays in the
// expression fragment, callable otherwise.
GenNumber pointValue(const GenFunction& u, const CompactPoint& x);

// Closed intervals (resolution tol) covering everything that is not locally
// negligible; empty for the zero function.
std::vector<ClosedInterval> supportEstimate(const GenFunction& u, double tol);

}  // namespace agcal
