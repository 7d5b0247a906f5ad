#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agcal/gen_function.hpp"

namespace agcal {

// A mollifier rho(x) = p(x) e^{-x^2} with p an even polynomial of degree at
// most M, unit mass and vanishing moments 1..M. The coefficients solve the
// Hankel system against the Gaussian moments; the class caches the verified
// integrals alongside the closed-form profile, whose derivatives of every
// order stay exact.
class Mollifier {
public:
    // Throws ArgumentError for M > 12 and ConstructionError when the moment
    // system is too ill-conditioned to trust (the condition estimate is in
    // the message).
    static Mollifier build(int momentOrder);

    int momentOrder() const { return M_; }
    const SmoothProfile& profile() const { return rho_; }

    double mass() const { return mass_; }        // integral of rho, near 1
    double absMass() const { return absMass_; }  // integral of |rho|
    double valueAtZero() const { return rho0_; }
    double conditionEstimate() const { return cond_; }
    // Measured k-th moments for k = 1..M (quadrature, all near 0).
    const std::vector<double>& moments() const { return moments_; }

    // integral of t^{2m} rho(t) over [-q, q].
    double partialMoment(int m, double q) const;

    std::string describe() const;

private:
    Mollifier() = default;

    int M_ = 0;
    SmoothProfile rho_ = SmoothProfile::gauss();
    double mass_ = 0, absMass_ = 0, rho0_ = 0, cond_ = 1;
    std::vector<double> moments_;
};

// A compactly supported distribution on the line, stored as a finite sum of
// terms: point masses with a derivative order (delta and its derivatives),
// smooth densities carried by a profile on a declared compact window, and
// derivatives of such densities.
class CompactDistribution {
public:
    enum class TermKind { PointMass, Density, DerivedDensity };

    struct Term {
        TermKind kind;
        double scale = 1.0;
        int order = 0;        // derivative order alpha
        double location = 0;  // PointMass only
        std::optional<SmoothProfile> density;
        double supLo = 0, supHi = 0;  // support window of the term
    };

    static CompactDistribution delta(double location, double scale = 1.0);
    static CompactDistribution derivedDelta(int order, double location, double scale = 1.0);
    static CompactDistribution density(SmoothProfile f, double supLo, double supHi,
                                       double scale = 1.0);
    static CompactDistribution derivedDensity(int order, SmoothProfile f, double supLo,
                                              double supHi, double scale = 1.0);

    CompactDistribution plus(const CompactDistribution& other) const;
    CompactDistribution scaled(double c) const;

    const std::vector<Term>& terms() const { return terms_; }
    // Smallest closed interval containing every term's support.
    std::pair<double, double> supportHull() const;

    // Exact pairing with a compactly supported test profile: point masses
    // evaluate derivatives, densities integrate against phi.
    double pairWith(const SmoothProfile& phi) const;

    std::string describe() const;

private:
    std::vector<Term> terms_;
};

// The model delta net x -> b_eps * rho(b_eps * x); requires b positive and
// infinite.
SmoothFamily modelDeltaNet(const RateExpr& b, const Mollifier& rho);

// Embedding of w by convolution with the model delta net, as an element of
// the algebra over (lo, hi) whose growth and negligibility families are both
// the natural powers of b. Point-mass terms embed in closed form, polynomial
// densities through the exact Taylor expansion, everything else by adaptive
// quadrature. Every term's support must sit inside the open interval.
GenFunction embed(const CompactDistribution& w, const RateExpr& b, const Mollifier& rho,
                  double lo, double hi);

// A fitted decay order: value ~ b^{-slope} over the sampled prefix where the
// values sit above rounding noise.
struct SlopeFit {
    double slope = 0;
    bool noiseLimited = false;  // some samples fell below the noise floor
    int used = 0;               // samples entering the fit
    std::vector<std::pair<double, double>> samples;  // (eps, value)
};

// Decay order of sup over [lo, hi] of |f * rho_eps - f| against b; expected
// M + 1 for generic smooth f (and below 1e-12 outright when f is a
// polynomial of degree <= M).
SlopeFit taylorResidualSlope(const SmoothProfile& f, const RateExpr& b, const Mollifier& rho,
                             double lo, double hi);

// A strict delta net: unit-mass bump-carried mollifiers phi_m with vanishing
// moments 1..m, switched so that at index eps the net uses the largest m
// whose derivative bound M_m = sup_{alpha <= m} |phi_m^(alpha)| stays below
// b_eps.
struct StrictDeltaRow {
    double eps = 0;
    int m = 0;
    double bound = 0;  // b_eps
};

struct StrictDeltaReport {
    SmoothFamily family = SmoothFamily::zero();  // psi_eps, a black box switching phi_m
    int cap = 0;                    // effective cap after conditioning
    std::vector<double> derivSup;   // M_m, m = 0..cap (cumulative max)
    std::vector<double> absMass;    // measured integral of |phi_m|
    std::vector<StrictDeltaRow> rows;
    std::string note;
};

StrictDeltaReport strictDeltaNet(const RateExpr& b, int mCap);

// Do the embeddings along b and c coincide? Exactly the question whether
// [b] = [c] as generalized numbers over the natural powers of b; the
// verdict is cross-checked by the delta-at-zero criterion (the difference of
// the embedded deltas at 0 is (b_eps - c_eps) rho(0)). Requires rho(0) != 0.
Verdict compareEmbeddings(const Net& bNet, const Net& cNet, const Mollifier& rho);

// The standard smooth plateau: 1 on [-q, q], 0 outside (-p, p), values in
// [0, 1].
std::function<double(double)> plateau(double p, double q);

// Certificate that embedding agreement along b forces b to generate the
// negligibility family Z. For each m the lower bound L_m = integral of
// t^{2m} rho over [-q, q] is computed and checked against the scaled test
// integrals on the eps grid; the generator question itself is decided
// symbolically. When a member of Z escapes every power of b, the report
// names it and records, per m, the failed domination b^{-m} = O(z^{-1}).
struct PrincipalNecessityReport {
    std::vector<int> mRange;
    std::vector<double> lowerBounds;      // L_m
    std::vector<Verdict> lowerBoundChecks;  // c_eps(m) >= L_m on the grid
    Verdict generatorTest;
    bool agreementConsistent = false;
    std::optional<RateExpr> escaper;
    std::vector<Verdict> escapeBlocks;  // per m: b^{-m} = O(z^{-1}) (all Fail)
    std::string summary;
};

PrincipalNecessityReport principalNecessityCertificate(
    const RateExpr& b, const Gauge& Z, const std::vector<int>& mRange, const Mollifier& rho,
    const std::function<double(double)>& psi, double p, double q);

// Convergence of the embedded distribution against a compactly supported
// test profile: the eps-indexed integrals next to the exact pairing, with
// the fitted decay order of the error.
struct PairingRow {
    double eps = 0;
    double value = 0;
    double error = 0;
};

struct PairingReport {
    double exact = 0;
    std::vector<PairingRow> rows;
    SlopeFit fit;
};

PairingReport deltaPairing(const CompactDistribution& w, const SmoothProfile& phi,
                           const RateExpr& b, const Mollifier& rho);

}  // namespace agcal
