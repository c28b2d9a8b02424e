#pragma once

// Fixed-point solvers for u = N(u) := J f(·,u) on grid nodes. The right-hand
// side f(t_j,u_j) is read as its piecewise-linear interpolant, so J is applied
// exactly and every method solves the same discrete equation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/kernel.hpp"
#include "cantilever/nonlinearity.hpp"

namespace cantilever {

enum class SolveMethod { Picard, MonotoneUp, MonotoneDown, Newton };
enum class SolveStatus { Converged, MaxIterations, StalledAtZero };

inline std::string_view to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Picard: return "picard";
    case SolveMethod::MonotoneUp: return "monotone-up";
    case SolveMethod::MonotoneDown: return "monotone-down";
    case SolveMethod::Newton: return "newton";
  }
  return "?";
}

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::StalledAtZero: return "stalled-at-zero";
  }
  return "?";
}

struct SolveReport {
  GridFunction solution;
  GridFunction curvature;  // u″ from the exact relation u″(t) = ∫_t^1 (s−t) f(s,u(s)) ds
  GridFunction rhs;        // f(t_j, u_j)
  int iterations = 0;
  double residual_sup = 0.0;
  double residual_L2 = 0.0;
  double norm_energetic = 0.0;
  double norm_L2 = 0.0;
  double norm_sup = 0.0;
  bool cone_M0_ok = false;
  bool cone_M_ok = false;
  bool convex_ok = false;
  std::vector<double> trace;      // residual per iteration
  std::vector<double> sup_trace;  // ‖u_k‖∞ per iteration
  SolveMethod method = SolveMethod::Picard;
  SolveStatus status = SolveStatus::MaxIterations;
  double lipschitz_estimate = 0.0;
  bool contraction_warning = false;  // lipschitz_estimate / 8 > 1
  std::string message;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// Node samples f(t_j, u_j).
inline GridFunction nemytskii(const NonlinearitySpec& spec, const GridFunction& u) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = spec.f(u.grid[i], u.values[i]);
  return GridFunction(u.grid, std::move(v));
}

/// N(u) = J f(·,u) at the nodes.
inline GridFunction fixed_point_map(const NonlinearitySpec& spec, const GridFunction& u) {
  return apply_J(nemytskii(spec, u));
}

/// (sup, L²) norms of u − N(u).
inline std::pair<double, double> residual(const NonlinearitySpec& spec, const GridFunction& u) {
  GridFunction d = fixed_point_map(spec, u);
  for (std::size_t i = 0; i < d.size(); ++i) d.values[i] = u.values[i] - d.values[i];
  return {d.sup_abs(), d.l2_norm()};
}

/// (J1)(t) = (t⁴ − 4t³ + 6t²)/24 at the nodes, scaled by `level`.
inline GridFunction scaled_unit_load(const Grid& g, double level) {
  return GridFunction::sample(g, [level](double t) { return level * t * t * (t * t - 4.0 * t + 6.0) / 24.0; });
}

namespace detail {

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

inline double lipschitz_estimate(const NonlinearitySpec& spec, double u_max) {
  double L = 0.0;
  constexpr int kT = 11, kU = 401;
  for (int i = 0; i < kT; ++i) {
    const double t = static_cast<double>(i) / (kT - 1);
    for (int j = 0; j < kU; ++j) {
      const double u = u_max * j / (kU - 1);
      const double d = spec.dfdu(t, u);
      if (std::isfinite(d)) L = std::max(L, std::abs(d));
      else L = std::numeric_limits<double>::infinity();
    }
  }
  return L;
}

/// Fill solution-derived fields (curvature, norms, cone flags, residuals).
inline void finalize(const NonlinearitySpec& spec, SolveReport& r) {
  const Grid& g = r.solution.grid;
  r.rhs = nemytskii(spec, r.solution);
  const JAction ja = JAction::piecewise_linear(r.rhs);
  r.curvature = ja.curvature_on(g);
  r.norm_energetic = ja.energetic_norm();
  r.norm_L2 = std::sqrt(gauss_composite([&](double t) { const double x = ja.u(t); return x * x; }, 0.0, 1.0,
                                        g.panels(), 6));
  r.norm_sup = r.solution.sup_abs();
  const auto [rs, rl] = residual(spec, r.solution);
  r.residual_sup = rs;
  r.residual_L2 = rl;
  r.convex_ok = r.cone_M0_ok = r.cone_M_ok = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g[i], u = r.solution.values[i];
    if (r.curvature.values[i] < -1e-9) r.convex_ok = false;
    if (u < minorant(Minorant::M0, t) * r.norm_energetic - 1e-6) r.cone_M0_ok = false;
    if (u < minorant(Minorant::M, t) * r.norm_sup - 1e-6) r.cone_M_ok = false;
  }
}

}  // namespace detail

/// Picard iteration u ← J f(·,u).
inline SolveReport picard(const NonlinearitySpec& spec, GridFunction u0, double tol, int maxit) {
  if (!(tol > 0.0)) throw PreconditionError("picard: tol must be positive");
  SolveReport r;
  r.method = SolveMethod::Picard;
  r.lipschitz_estimate = detail::lipschitz_estimate(spec, std::max(1.0, 2.0 * u0.sup_abs()));
  r.contraction_warning = r.lipschitz_estimate / 8.0 > 1.0;
  GridFunction u = std::move(u0);
  int growth = 0;
  for (int k = 0; k <= maxit; ++k) {
    GridFunction next = fixed_point_map(spec, u);
    const double res = detail::max_abs_diff(u, next);
    r.trace.push_back(res);
    r.sup_trace.push_back(u.sup_abs());
    if (r.trace.size() >= 2 && res > 2.0 * r.trace[r.trace.size() - 2]) {
      if (++growth >= 3) throw DivergenceError("picard: residual grew by more than 2x three times in a row", r.trace);
    } else {
      growth = 0;
    }
    if (res < tol) {
      r.status = SolveStatus::Converged;
      r.iterations = k;
      r.solution = std::move(u);
      detail::finalize(spec, r);
      return r;
    }
    if (k == maxit) break;
    u = std::move(next);
  }
  r.iterations = maxit;
  r.status = SolveStatus::MaxIterations;
  r.solution = std::move(u);
  r.message = "maximum iterations reached";
  detail::finalize(spec, r);
  return r;
}

/// Monotone iteration from a supersolution (Down) or subsolution (Up).
/// Requires f nondecreasing in u (sampled check).
inline SolveReport monotone_iterate(const NonlinearitySpec& spec, GridFunction start, SolveMethod direction,
                                    double tol, int maxit) {
  if (direction != SolveMethod::MonotoneUp && direction != SolveMethod::MonotoneDown)
    throw PreconditionError("monotone_iterate: direction must be up or down");
  if (!(tol > 0.0)) throw PreconditionError("monotone_iterate: tol must be positive");
  const auto mono = check_monotone(spec, 65, std::max(1.0, 10.0 * start.sup_abs()));
  if (!mono.pass) throw PreconditionError("monotone_iterate: f is not nondecreasing (sampled check failed)");
  const bool down = direction == SolveMethod::MonotoneDown;

  auto check_order = [&](const GridFunction& prev, const GridFunction& next, double slack, const char* what) {
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const double scale = std::max(1.0, std::abs(prev.values[i]));
      const double viol = down ? next.values[i] - prev.values[i] : prev.values[i] - next.values[i];
      if (viol > slack * scale) throw OrderingError(what, i, viol);
    }
  };

  SolveReport r;
  r.method = direction;
  r.lipschitz_estimate = detail::lipschitz_estimate(spec, std::max(1.0, 2.0 * start.sup_abs()));
  r.contraction_warning = r.lipschitz_estimate / 8.0 > 1.0;
  GridFunction u = std::move(start);
  for (int k = 0; k <= maxit; ++k) {
    GridFunction next = fixed_point_map(spec, u);
    if (k == 0)
      check_order(u, next, 1e-12, down ? "monotone_iterate: start is not a supersolution"
                                       : "monotone_iterate: start is not a subsolution");
    else
      check_order(u, next, 1e-10, "monotone_iterate: iterates lost their ordering");
    const double res = detail::max_abs_diff(u, next);
    r.trace.push_back(res);
    r.sup_trace.push_back(u.sup_abs());
    if (res < tol) {
      r.iterations = k;
      r.status = u.sup_abs() < 1e-14 ? SolveStatus::StalledAtZero : SolveStatus::Converged;
      if (r.status == SolveStatus::StalledAtZero) r.message = "iteration is fixed at u = 0, not a positive solution";
      r.solution = std::move(u);
      detail::finalize(spec, r);
      return r;
    }
    if (k == maxit) break;
    u = std::move(next);
  }
  r.iterations = maxit;
  r.status = SolveStatus::MaxIterations;
  r.message = "maximum iterations reached";
  r.solution = std::move(u);
  detail::finalize(spec, r);
  return r;
}

/// Dense matrix W with (Wv)_i = (J v_h)(t_i), v_h the piecewise-linear interpolant.
inline Eigen::MatrixXd green_matrix(const Grid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd W(n, n);
  std::vector<double> e(g.size(), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    const GridFunction col = apply_J(GridFunction(g, e));
    for (Eigen::Index i = 0; i < n; ++i) W(i, j) = col.values[static_cast<std::size_t>(i)];
    e[static_cast<std::size_t>(j)] = 0.0;
  }
  return W;
}

/// Damped Newton on R(u) = u − W f(·,u) with step halving.
inline SolveReport newton_solve(const NonlinearitySpec& spec, GridFunction u0, double tol, int maxit) {
  if (!(tol > 0.0)) throw PreconditionError("newton_solve: tol must be positive");
  const Grid g = u0.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::MatrixXd W = green_matrix(g);

  auto eval_f = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = spec.f(g[static_cast<std::size_t>(i)], u(i));
    return v;
  };
  auto eval_res = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd { return u - W * eval_f(u); };

  SolveReport r;
  r.method = SolveMethod::Newton;
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.values.data(), n);
  Eigen::VectorXd R = eval_res(u);
  double rnorm = R.lpNorm<Eigen::Infinity>();
  r.trace.push_back(rnorm);
  r.sup_trace.push_back(u.lpNorm<Eigen::Infinity>());
  int k = 0;
  for (; k < maxit && !(rnorm < tol); ++k) {
    Eigen::VectorXd slope(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = g[static_cast<std::size_t>(i)];
      double d = spec.dfdu(t, u(i));
      if (!std::isfinite(d)) {
        const double h = 1e-8 * std::max(1.0, std::abs(u(i)));
        d = (spec.f(t, u(i) + h) - spec.f(t, u(i))) / h;
      }
      slope(i) = d;
    }
    Eigen::MatrixXd Jac = -W * slope.asDiagonal();
    Jac.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jac);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw SingularJacobian("newton_solve: Jacobian is numerically singular", rc);
    const Eigen::VectorXd step = lu.solve(-R);
    double lambda = 1.0;
    for (;;) {
      Eigen::VectorXd trial = u + lambda * step;
      Eigen::VectorXd Rt = eval_res(trial);
      const double tn = Rt.lpNorm<Eigen::Infinity>();
      if (tn < (1.0 - 1e-4 * lambda) * rnorm || tn < tol) {
        u = std::move(trial);
        R = std::move(Rt);
        rnorm = tn;
        break;
      }
      lambda *= 0.5;
      if (lambda < 1e-10)
        throw LineSearchFailure("newton_solve: line search failed",
                                std::vector<double>(u.data(), u.data() + u.size()));
    }
    r.trace.push_back(rnorm);
    r.sup_trace.push_back(u.lpNorm<Eigen::Infinity>());
  }
  r.iterations = k;
  r.status = rnorm < tol ? SolveStatus::Converged : SolveStatus::MaxIterations;
  if (!r.converged()) r.message = "maximum iterations reached";
  r.solution = GridFunction(g, std::vector<double>(u.data(), u.data() + u.size()));
  detail::finalize(spec, r);
  return r;
}

}  // namespace cantilever
