#pragma once

// The two reference nonlinearities used by `reproduce` and the tests.

#include <string>
#include <utility>

#include "cantilever/expression.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/variational.hpp"

namespace cantilever {

/// Linear near zero, saturating at 138 for u ≥ 0.03.
inline constexpr const char* kCantileverLoadText = "[0,0.03): 4600*u ; [0.03,inf): 138";

/// Sublinear power near zero and at infinity, quadratic on [1,b):
/// p·u^p on [0,1), p·u² on [1,b), p·((u−b)^p + b²) beyond.
inline std::string power_family_text(double p, double b) {
  const std::string ps = Expr::format_number(p), bs = Expr::format_number(b);
  return "[0,1): " + ps + "*u^" + ps + " ; [1," + bs + "): " + ps + "*u^2 ; [" + bs + ",inf): " + ps + "*((u-" + bs +
         ")^" + ps + " + " + bs + "^2)";
}

/// u₀ = φ₁/|φ₁| and u₁ = the multiple of u₀ with sup u₁ = b, as curvatures.
inline std::pair<CurvatureRepr, CurvatureRepr> power_family_endpoints(double b, const Grid& grid) {
  auto w0 = normalized_phi_curvature(grid);
  auto w1 = (b / norms(w0).sup_of_u) * w0;
  return {std::move(w0), std::move(w1)};
}

}  // namespace cantilever
