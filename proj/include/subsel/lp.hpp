#pragma once

#include "subsel/linalg.hpp"

#include <span>

namespace subsel {

struct InteriorPoint {
  bool fullDimensional = false;
  RatVector point;  // strictly satisfies every half-space when fullDimensional
  // Full-dimensional: a positive lower bound on min_i f_i at some point.
  // Otherwise: an upper bound <= 0 on max_y min_i f_i(y) (capped at 1).
  Rational margin;
};

/// Decides whether {y : f_i(y) >= 0 for all i} has nonempty interior and
/// returns a simple rational point strictly inside when it does. A
/// floating-point simplex proposes the answer, which is accepted only with an
/// exact certificate (a rational interior point, or nonnegative multipliers
/// u with sum u_i a_i = 0 and sum u_i c_i <= 0); otherwise the exact simplex
/// decides.
InteriorPoint findInteriorPoint(std::span<const LinearFunctional<Rational>> halfspaces, Index dim);

/// The same decision by the exact simplex alone (Bland's rule).
InteriorPoint findInteriorPointExact(std::span<const LinearFunctional<Rational>> halfspaces, Index dim);

}  // namespace subsel
