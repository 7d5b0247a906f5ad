#pragma once

#include <string>

#include "agcal/rate_expr.hpp"

namespace agcal {

// Recursive-descent parser for the published scale-expression grammar:
//
//   expr     := '-'? term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := primary ('^' exponent)?
//   exponent := rational | '(' rational ')'
//   primary  := 'eps' | rational | 'log' '(' expr ')' | 'exp' '(' expr ')'
//             | 'exp@' nat '(' expr ')' | 'hyper' '(' rational ')'
//             | 'abs' '(' expr ')' | 'comp' '(' expr ',' expr ')' | '(' expr ')'
//   rational := int ('/' nat)?
//
// Whitespace-insensitive. In exponent and hyper positions the rational is
// consumed greedily, so eps^-3/2 means eps^(-3/2). Elsewhere '/' is ordinary
// division (x/y is x * y^-1); an int/nat pair in value position folds to one
// rational constant unless the denominator carries its own exponent (3/4^2
// keeps ^ binding tighter and reads as 3 / 4^2). Decimal literals (1.5,
// 1e-3) are accepted for programmatic round-trips.
RateExpr parse(const std::string& text);

} // namespace agcal
