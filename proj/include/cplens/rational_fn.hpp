#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "cplens/bipoly.hpp"
#include "cplens/errors.hpp"

namespace cplens {

/// Ratio of bivariate polynomials num/den. The denominator is never the zero
/// polynomial; the degree condition (total deg num < total deg den) is a model
/// invariant checked at validation, not here.
struct RationalFn {
  BiPoly num;
  BiPoly den = BiPoly::one();

  RationalFn() = default;
  RationalFn(BiPoly n, BiPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw ZeroDenominator("rational function with zero denominator");
  }

  Cx eval(Cx z1, Cx z2) const { return num.eval(z1, z2) / den.eval(z1, z2); }

  /// Denominator magnitude relative to its coefficient scale at the point,
  /// with radii clamped to at least one so a vanishing monomial still reads
  /// as a pole; ~0 near any zero of the denominator, ~1 well away from them.
  double den_margin(Cx z1, Cx z2) const {
    const Cx r1{std::max(1.0, std::abs(z1))};
    const Cx r2{std::max(1.0, std::abs(z2))};
    double bound = den.eval_bound(r1, r2);
    if (bound == 0.0) return 0.0;
    return std::abs(den.eval(z1, z2)) / bound;
  }

  /// Partial derivative by the quotient rule, evaluated at a point.
  Cx partial_eval(Var v, Cx z1, Cx z2) const {
    Cx n = num.eval(z1, z2), d = den.eval(z1, z2);
    Cx dn = num.partial(v).eval(z1, z2), dd = den.partial(v).eval(z1, z2);
    return (dn * d - n * dd) / (d * d);
  }

  RationalFn conj_transpose() const { return {num.conj_transpose(), den.conj_transpose()}; }
};

}  // namespace cplens
