#pragma once

#include "agcal/rate_expr.hpp"

namespace agcal {

// Directed index sets the engine works over. Points are ordered toward the
// limit: eps -> 0+ on the half-open unit interval, n -> infinity over the
// naturals with the cofinite (Frechet) order.
//
// Composed(scale) reparameterizes the unit interval: a symbolic net f lives
// at scale(eps), so growth statements are decided on f composed with scale.
struct IndexSet {
    enum class Kind { HalfOpenUnit, NaturalsFrechet, Composed };
    Kind kind = Kind::HalfOpenUnit;
    RateExpr scale; // Composed only

    static IndexSet halfOpenUnit() { return {Kind::HalfOpenUnit, RateExpr()}; }
    static IndexSet naturalsFrechet() { return {Kind::NaturalsFrechet, RateExpr()}; }
    static IndexSet composed(const RateExpr& scale) { return {Kind::Composed, scale}; }

    bool same(const IndexSet& o) const {
        if (kind != o.kind) return false;
        if (kind != Kind::Composed) return true;
        return scale.sameTree(o.scale);
    }

    std::string name() const {
        switch (kind) {
            case Kind::HalfOpenUnit: return "(0,1]";
            case Kind::NaturalsFrechet: return "naturals";
            case Kind::Composed: return "composed(" + scale.str() + ")";
        }
        return "?";
    }
};

// Geometric evaluation grid toward the limit.
struct GridSpec {
    double eps0 = 0.1;
    double ratio = 0.7;
    int points = 40;
};

} // namespace agcal
