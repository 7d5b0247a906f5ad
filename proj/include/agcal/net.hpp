#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agcal/index_set.hpp"
#include "agcal/normal_form.hpp"
#include "agcal/rate_expr.hpp"

namespace agcal {

// A net of reals over an index set. Three flavours:
//   Symbolic  closed-form scale expression; growth questions decided exactly
//   Sampled   frozen values on a strictly decreasing eps grid (>= 8 points)
//   Callable  arbitrary evaluator; numeric mode only
//
// Sample abscissae always live in the eps coordinate; nets over the naturals
// store eps = 1/n. Arithmetic stays symbolic when both operands are symbolic
// and degrades to a callable closure otherwise.
class Net {
public:
    enum class Rep { Symbolic, Sampled, Callable };

    static Net symbolic(const RateExpr& e, IndexSet index = IndexSet::halfOpenUnit());
    static Net symbolic(const std::string& text, IndexSet index = IndexSet::halfOpenUnit());
    static Net sampled(std::vector<double> eps, std::vector<double> values,
                       IndexSet index = IndexSet::halfOpenUnit());
    static Net callable(std::function<double(double)> fn, std::string label = "callable",
                        IndexSet index = IndexSet::halfOpenUnit());
    static Net zero(IndexSet index = IndexSet::halfOpenUnit());

    Rep rep() const { return rep_; }
    const IndexSet& index() const { return index_; }
    bool isSymbolic() const { return rep_ == Rep::Symbolic; }
    const RateExpr& expr() const; // Symbolic only
    const std::vector<double>& sampleEps() const { return sampleEps_; }

    // Value at a grid point (eps coordinate; n for naturals is passed as
    // eps = 1/n by the grid helpers). Sampled nets interpolate log-log
    // between their abscissae and refuse points outside their range.
    double at(double eps) const;

    // Exact growth form, when available. Composed indices are normalized
    // through their scale. Returns nullopt for sampled/callable nets; throws
    // FragmentError if the expression leaves the fragment.
    std::optional<NormalForm> normalForm() const;

    std::string describe() const;

    Net operator-() const;
    Net absNet() const;
    friend Net operator+(const Net& a, const Net& b);
    friend Net operator-(const Net& a, const Net& b);
    friend Net operator*(const Net& a, const Net& b);

    // Net reinterpreted at scale(eps). Symbolic nets stay symbolic.
    Net composedWith(const RateExpr& scale) const;

private:
    Rep rep_ = Rep::Symbolic;
    IndexSet index_;
    RateExpr expr_;
    std::vector<double> sampleEps_;   // decreasing
    std::vector<double> sampleVal_;
    std::function<double(double)> fn_;
    std::string label_;
};

// Evaluation points toward the limit (decreasing eps). For the naturals the
// grid is eps = 1, 1/2, ..., 1/budget.
std::vector<double> gridPoints(const IndexSet& index, const GridSpec& grid, int naturalsBudget = 200);

} // namespace agcal
