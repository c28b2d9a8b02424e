#pragma once

// First eigenpair of φ'''' = λφ under the cantilever conditions:
// λ₁ = β⁴ with β the smallest positive root of cos β cosh β + 1 = 0.

#include <cmath>
#include <numbers>

#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/kernel.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

/// The four-digit value quoted in the literature for β, kept for comparison only.
inline constexpr double kQuotedBeta = std::numbers::pi / 2.0 + 0.3042;

inline double frequency_equation(double x) { return std::cos(x) * std::cosh(x) + 1.0; }

/// Bisection on (π/2, π) followed by Newton polishing.
inline double solve_beta(double tol = 1e-12) {
  if (!(tol > 0.0)) throw PreconditionError("solve_beta: tol must be positive");
  double lo = std::numbers::pi / 2.0, hi = std::numbers::pi;
  double flo = frequency_equation(lo);
  if (flo * frequency_equation(hi) > 0.0) throw std::runtime_error("solve_beta: root not bracketed");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = frequency_equation(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double fx = frequency_equation(x);
    if (std::abs(fx) < tol) break;
    const double dfx = -std::sin(x) * std::cosh(x) + std::cos(x) * std::sinh(x);
    x -= fx / dfx;
  }
  return x;
}

/// d^order/dt^order of φ₁(t) = sin βt − sinh βt + σ(cosh βt − cos βt),
/// σ = (sinh β + sin β)/(cosh β + cos β). order ∈ 0..4.
inline double phi1(double beta, double t, int order = 0) {
  detail::require_unit(t, "phi1");
  if (order < 0 || order > 4) throw PreconditionError("phi1: order must be in 0..4");
  const double sigma = (std::sinh(beta) + std::sin(beta)) / (std::cosh(beta) + std::cos(beta));
  const double x = beta * t;
  const double s = std::sin(x), c = std::cos(x), sh = std::sinh(x), ch = std::cosh(x);
  // d/dt cycles sin→cos→−sin→−cos and sinh↔cosh.
  double trig_sin, trig_cos;
  switch (order % 4) {
    case 0: trig_sin = s; trig_cos = c; break;
    case 1: trig_sin = c; trig_cos = -s; break;
    case 2: trig_sin = -s; trig_cos = -c; break;
    default: trig_sin = -c; trig_cos = s; break;
  }
  const double hyp_sinh = order % 2 == 0 ? sh : ch;
  const double hyp_cosh = order % 2 == 0 ? ch : sh;
  return std::pow(beta, order) * (trig_sin - hyp_sinh + sigma * (hyp_cosh - trig_cos));
}

struct EigenPair {
  double beta = 0.0;
  double lambda1 = 0.0;
  double energetic_norm = 0.0;  // |φ₁|
  GridFunction phi;
  GridFunction phi_normalized;  // φ₁/|φ₁|
  GridFunction d1, d2, d3, d4;  // φ₁', φ₁'', φ₁''', φ₁''''

  bool convex_ok = false;           // φ₁'' >= −1e-9 at nodes
  bool harnack_ok = false;          // φ₁ >= M₀|φ₁| − 1e-9 at nodes
  double harnack_worst_slack = 0.0;
  double eigen_residual = 0.0;      // max |φ₁'''' − β⁴φ₁| over nodes
  double boundary_residual = 0.0;   // max of |φ(0)|, |φ'(0)|, |φ''(1)|, |φ'''(1)|
};

/// |φ₁| = ‖φ₁''‖_{L²} from analytic second derivatives.
inline double phi1_energetic_norm(double beta) {
  QuadratureConfig cfg;
  cfg.panels = 64;
  return std::sqrt(integrate([beta](double t) { const double d = phi1(beta, t, 2); return d * d; }, 0.0, 1.0, cfg).value);
}

inline EigenPair eigen_report(const Grid& grid) {
  if (grid.panels() < 64) throw PreconditionError("eigen_report: need at least 64 panels");
  EigenPair e;
  e.beta = solve_beta(1e-14);
  e.lambda1 = e.beta * e.beta * e.beta * e.beta;
  const double b = e.beta;
  e.phi = GridFunction::sample(grid, [b](double t) { return phi1(b, t, 0); });
  e.d1 = GridFunction::sample(grid, [b](double t) { return phi1(b, t, 1); });
  e.d2 = GridFunction::sample(grid, [b](double t) { return phi1(b, t, 2); });
  e.d3 = GridFunction::sample(grid, [b](double t) { return phi1(b, t, 3); });
  e.d4 = GridFunction::sample(grid, [b](double t) { return phi1(b, t, 4); });
  e.energetic_norm = phi1_energetic_norm(b);
  e.phi_normalized = (1.0 / e.energetic_norm) * e.phi;

  e.convex_ok = true;
  e.harnack_ok = true;
  e.harnack_worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (e.d2.values[i] < -1e-9) e.convex_ok = false;
    const double slack = e.phi.values[i] - minorant(Minorant::M0, grid[i]) * e.energetic_norm;
    e.harnack_worst_slack = std::min(e.harnack_worst_slack, slack);
    if (slack < -1e-9) e.harnack_ok = false;
    e.eigen_residual = std::max(e.eigen_residual, std::abs(e.d4.values[i] - e.lambda1 * e.phi.values[i]));
  }
  e.boundary_residual = std::max({std::abs(phi1(b, 0.0, 0)), std::abs(phi1(b, 0.0, 1)), std::abs(phi1(b, 1.0, 2)),
                                  std::abs(phi1(b, 1.0, 3))});
  return e;
}

}  // namespace cantilever
