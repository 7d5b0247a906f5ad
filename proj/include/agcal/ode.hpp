#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agcal/gen_function.hpp"

namespace agcal {

// Dense real matrix, row index first. Small dimensions only (the solvers
// target d <= 4); no sparsity, no views.
using RealMatrix = std::vector<std::vector<double>>;

// Scaling-and-squaring matrix exponential with a diagonal Pade core
// (order 7, scaled so ||A||_F / 2^s <= 0.5). Returns nullopt when the result
// overflows double range or the required scaling depth exceeds 64.
// extraScaling adds squaring steps on top of the automatic choice (the
// result must not depend on it; see solutionsAgree).
std::optional<RealMatrix> matrixExp(const RealMatrix& A, int extraScaling = 0);

// Growth bounds for the entries of e^{At} with M = max |a_ij|:
//   paperBound     M * e^{d M |t|}   (fails for M < 1: e^0 = I has entries 1)
//   correctedBound 1 + (e^{d M |t|} - 1) / d   (valid for every M >= 0)
struct EntryBounds {
    double paperBound = 0;
    double correctedBound = 0;
};
EntryBounds entryBound(const RealMatrix& A, double t);

// A square matrix of generalized numbers with a certified growth bound:
// every entry admits a boundedBy-moderate representative.
class GenMatrix {
public:
    // Entries must form a d x d array of scalar generalized numbers sharing
    // one algebra spec; construction runs isBoundedBy on every entry and
    // throws ConstructionError unless all verdicts hold.
    static GenMatrix make(std::vector<std::vector<GenNumber>> entries, Gauge boundedBy);

    int dim() const { return static_cast<int>(entries_.size()); }
    const GenNumber& entry(int i, int j) const { return entries_[i][j]; }
    const Gauge& boundedBy() const { return boundedBy_; }
    const AlgebraSpec& spec() const;
    const std::vector<Verdict>& entryCertificates() const { return certs_; }

    RealMatrix evalAt(double eps) const;

    // Sum of |a_ij| as a closed-form net (an upper bound for max |a_ij|
    // inside the same moderate ring); nullopt when an entry is not symbolic.
    std::optional<RateExpr> absSumExpr() const;
    // Frobenius norm (sum a_ij^2)^(1/2) in closed form, when available.
    std::optional<RateExpr> frobeniusExpr() const;

    std::string describe() const;

private:
    GenMatrix(std::vector<std::vector<GenNumber>> entries, Gauge boundedBy,
              std::vector<Verdict> certs)
        : entries_(std::move(entries)), boundedBy_(std::move(boundedBy)),
          certs_(std::move(certs)) {}

    std::vector<std::vector<GenNumber>> entries_;
    Gauge boundedBy_;
    std::vector<Verdict> certs_;
};

// The linear constant-coefficient problem x'(t) + A x(t) = 0, x(t0) = c,
// read in the algebra over solutionSpec = (B', Z'). Construction certifies
// the standing hypotheses: A and c bounded by B, and the inclusion chain
// exp-of-B moderate ring inside B' inside Z'.
struct ODEProblem {
    GenMatrix A;
    std::vector<GenNumber> c;
    double t0 = 0;
    Gauge B;
    AlgebraSpec solutionSpec;

    static ODEProblem make(GenMatrix A, std::vector<GenNumber> c, double t0, Gauge B,
                           AlgebraSpec solutionSpec);
    std::string describe() const;
};

struct SolveOptions {
    std::vector<double> epsGrid;  // decreasing; empty = default grid
    std::vector<double> tGrid;    // empty = 21 points over [t0 - 1, t0 + 1]
    int extraScaling = 0;         // forwarded to matrixExp
    double domainPad = 0.5;       // GenFunction domain beyond the t grid hull
};

// The per-eps solution x_eps(t) = expm(-(t - t0) A_eps) c_eps, wrapped as
// black-box generalized functions, together with the grid bookkeeping and
// the moderateness certificate (analytic envelope exp(d R sum|a_ij|) sum|c_j|
// checked against the target growth family, conjoined with the measured
// grid-sup domination by the corrected entry bound).
struct ODESolution {
    ODEProblem problem;
    std::vector<GenFunction> components;
    Verdict certificate;

    std::vector<double> epsGrid;  // kept grid after overflow truncation
    std::vector<double> tGrid;
    int truncated = 0;            // eps points dropped to overflow
    // max over the grid of |x'(t) + A x(t)| / (1 + |x(t)|), the derivative
    // taken by central differences as a cross-check of the exact relation
    // x' = -A x; measured where ||A_eps||_F <= 100 (past that the rounding
    // noise of the difference quotient swamps the 1e-7 scale).
    double maxResidual = 0;
    int residualPoints = 0;       // eps points entering the residual metric
    std::string note;
};

ODESolution solveLinear(const ODEProblem& p, const SolveOptions& opt = {});

// Moderateness of the solution against an arbitrary growth family: per
// derivative order k <= alphaMax (derivatives taken through the equation,
// x^(k) = (-A)^k x), the closed-form envelope (d sum|a_ij|)^k exp(d R
// sum|a_ij|) sum|c_j| is tested for domination by a member; when the
// envelope itself escapes the family, the measured sup net decides instead.
Verdict verifyModerateAgainst(const ODESolution& sol, const Gauge& target,
                              const std::vector<ClosedInterval>& Kset, int alphaMax);

// The existence-side certificate: moderateness against the exponential
// family over B.
Verdict verifyModerateExpB(const ODESolution& sol, const Gauge& B,
                           const std::vector<ClosedInterval>& Kset, int alphaMax);

// The uniqueness estimate: for a candidate solving the perturbed problem
// x' + A x = n, x(t0) = v, the sup over [t0 - R, t0 + R] obeys
//   sup |x| <= e^{R |A|_F} |v| + R e^{R |A|_F} sup|n|,
// and the verdict says whether that bound net is Z'-negligible. When n is
// empty the residual nets are measured from the candidate by central
// differences. Holds certifies that perturbations of this size cannot
// separate two solutions.
Verdict uniquenessResidual(const std::vector<GenFunction>& candidate, const ODEProblem& p,
                           const std::vector<GenFunction>& n, const std::vector<GenNumber>& v,
                           double R = 1.0);

// Do two solves of the same problem agree as elements of the quotient? The
// representatives are compared on the shared grid; agreement at relative
// tolerance certifies (numerically) that the runs produced the same
// mathematical net, whence equality in the quotient. Instrument noise sits
// far above the deep negligibility thresholds, so this is the honest form
// of the check.
Verdict solutionsAgree(const ODESolution& a, const ODESolution& b, double relTol = 1e-9);

// Read the solution in a smaller algebra (the linear case of the projection
// morphism): requires target to precede the solution's spec in the algebra
// order and the solution's envelope to be target-moderate, then rebuilds the
// components and certificate under target. The family is unchanged, so the
// projected solution solves the projected problem with the same residuals.
ODESolution projectSolution(const ODESolution& sol, const AlgebraSpec& target);

// Necessity probe for minimality: for the j-th members b of B, j <= probes,
// the families e^{b_eps t} (the solutions of x' - b x = 0) must be
// Bprime-moderate on [-1, 1] with derivative nets |b|^k e^{|b|}, k <= 2.
// Fails names the escaping probe. Combined with algebraOrder this realizes
// "the exponential algebra is the smallest one solving every such ODE".
Verdict minimalityCheck(const Gauge& B, const Gauge& Bprime, int probes);

}  // namespace agcal
