#pragma once

// Green's function of u'''' = v with u(0)=u'(0)=u''(1)=u'''(1)=0, the
// Harnack minorants, and the integral operator (Jv)(t) = ∫ G(t,s) v(s) ds.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

namespace detail {
inline void require_unit(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(who) + ": argument outside [0,1]");
}
}  // namespace detail

inline double green(double t, double s) {
  detail::require_unit(t, "green");
  detail::require_unit(s, "green");
  return s <= t ? s * s * (3.0 * t - s) / 6.0 : t * t * (3.0 * s - t) / 6.0;
}

/// ∂²G/∂t². The diagonal s = t takes the s <= t branch (value 0, continuous there).
inline double green_tt(double t, double s) {
  detail::require_unit(t, "green_tt");
  detail::require_unit(s, "green_tt");
  return s <= t ? 0.0 : s - t;
}

enum class Minorant { M0, M1, M };

inline std::string_view to_string(Minorant k) {
  switch (k) {
    case Minorant::M0: return "M0";
    case Minorant::M1: return "M1";
    case Minorant::M: return "M";
  }
  return "?";
}

/// M0(t) = √2(1−t)t³/6, M1(t) = (2/3)t^{3/2}, M(t) = (3−t)t²/3.
inline double minorant(Minorant kind, double t) {
  detail::require_unit(t, "minorant");
  switch (kind) {
    case Minorant::M0: return std::numbers::sqrt2 * (1.0 - t) * t * t * t / 6.0;
    case Minorant::M1: return 2.0 / 3.0 * t * std::sqrt(t);
    case Minorant::M: return (3.0 - t) * t * t / 3.0;
  }
  return 0.0;
}

/// Sup-norm embedding constant: ‖u‖∞ <= c∞ |u| on X.
inline constexpr double kSupEmbedding = 2.0 / 3.0;

/// Abscissae in (0,1) where minorant(kind,t)·radius crosses any of `levels`.
/// Found by sign-change scan plus bisection; used as quadrature split points.
inline std::vector<double> minorant_crossings(Minorant kind, double radius, std::span<const double> levels,
                                              int scan = 512) {
  std::vector<double> out;
  for (double level : levels) {
    auto g = [&](double t) { return minorant(kind, t) * radius - level; };
    double a = 0.0, ga = g(a);
    for (int i = 1; i <= scan; ++i) {
      const double b = static_cast<double>(i) / scan;
      const double gb = g(b);
      if (ga == 0.0 && a > 0.0 && a < 1.0) out.push_back(a);
      if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
        double lo = a, hi = b, glo = ga;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        out.push_back(0.5 * (lo + hi));
      }
      a = b;
      ga = gb;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// The function u = Jv for a fixed right-hand side v, evaluated through the
/// cumulative moments A_k(t) = ∫_0^t s^k v(s) ds, k = 0..3:
///   u(t)  = (t/2)A_2 − A_3/6 + (t²/2)B_1 − (t³/6)B_0,   B_k = ∫_t^1 s^k v,
///   u″(t) = B_1 − t B_0.
/// v must be smooth between consecutive cut points; each piece is integrated
/// with a fixed Gauss rule, so polynomial v of low degree is handled exactly.
class JAction {
 public:
  JAction(std::function<double(double)> v, std::vector<double> cuts, int points)
      : v_(std::move(v)), points_(points) {
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    std::erase_if(cuts, [](double c) { return c < 0.0 || c > 1.0; });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts_ = std::move(cuts);
    cumulative_.assign(cuts_.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i + 1 < cuts_.size(); ++i) {
      const auto m = partial(cuts_[i], cuts_[i + 1]);
      for (int k = 0; k < 4; ++k) cumulative_[i + 1][k] = cumulative_[i][k] + m[k];
    }
  }

  /// v piecewise linear on its grid; moments are exact.
  static JAction piecewise_linear(const GridFunction& v) {
    std::vector<double> cuts(v.grid.nodes().begin(), v.grid.nodes().end());
    return JAction([v](double s) { return v(s); }, std::move(cuts), 4);
  }

  double u(double t) const {
    const auto a = moments_to(t);
    const auto& tot = cumulative_.back();
    const double b0 = tot[0] - a[0], b1 = tot[1] - a[1];
    return 0.5 * t * a[2] - a[3] / 6.0 + 0.5 * t * t * b1 - t * t * t / 6.0 * b0;
  }

  /// u″(t) = ∫_t^1 (s − t) v(s) ds.
  double curvature(double t) const {
    const auto a = moments_to(t);
    const auto& tot = cumulative_.back();
    return (tot[1] - a[1]) - t * (tot[0] - a[0]);
  }

  /// |u| = ‖u″‖_{L²}, by the same per-piece Gauss rule (exact for polynomial v
  /// when the rule has enough points).
  double energetic_norm() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts_.size(); ++i)
      acc += gauss_interval([this](double t) { double c = curvature(t); return c * c; }, cuts_[i], cuts_[i + 1],
                            std::max(points_, 4));
    return std::sqrt(acc);
  }

  GridFunction on(const Grid& g) const {
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vals[i] = i == 0 ? 0.0 : u(g[i]);
    return GridFunction(g, std::move(vals));
  }

  GridFunction curvature_on(const Grid& g) const {
    return GridFunction::sample(g, [this](double t) { return curvature(t); });
  }

  std::span<const double> cuts() const noexcept { return cuts_; }

 private:
  std::array<double, 4> partial(double a, double b) const {
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};
    if (b <= a) return m;
    const GaussRule& r = gauss_legendre(points_);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double s = mid + half * r.nodes[q];
      const double wv = r.weights[q] * half * v_(s);
      m[0] += wv;
      m[1] += wv * s;
      m[2] += wv * s * s;
      m[3] += wv * s * s * s;
    }
    return m;
  }

  std::array<double, 4> moments_to(double t) const {
    if (t <= 0.0) return {0.0, 0.0, 0.0, 0.0};
    if (t >= 1.0) return cumulative_.back();
    auto it = std::upper_bound(cuts_.begin(), cuts_.end(), t);
    const auto i = static_cast<std::size_t>(std::distance(cuts_.begin(), it)) - 1;
    auto m = partial(cuts_[i], t);
    for (int k = 0; k < 4; ++k) m[k] += cumulative_[i][k];
    return m;
  }

  std::function<double(double)> v_;
  int points_;
  std::vector<double> cuts_;
  std::vector<std::array<double, 4>> cumulative_;
};

namespace detail {
inline std::vector<double> panel_cuts(int panels, std::span<const double> kinks) {
  std::vector<double> cuts(kinks.begin(), kinks.end());
  for (int i = 0; i <= panels; ++i) cuts.push_back(static_cast<double>(i) / panels);
  return cuts;
}
}  // namespace detail

/// Jv at the grid nodes for a piecewise-linear v (exact up to roundoff).
inline GridFunction apply_J(const GridFunction& v) { return JAction::piecewise_linear(v).on(v.grid); }

/// Jv at the nodes of `grid` for a callable v that is smooth between `kinks`.
/// Panels are doubled from cfg.panels until node values settle to
/// cfg.refinement_tolerance.
template <class F>
GridFunction apply_J(F&& v, const Grid& grid, const QuadratureConfig& cfg = {},
                     std::span<const double> kinks = {}) {
  cfg.validate();
  std::function<double(double)> fn = std::forward<F>(v);
  int panels = cfg.panels;
  GridFunction prev = JAction(fn, detail::panel_cuts(panels, kinks), cfg.points_per_panel).on(grid);
  double gap = 0.0;
  for (int d = 0; d < cfg.max_doublings; ++d) {
    panels *= 2;
    GridFunction cur = JAction(fn, detail::panel_cuts(panels, kinks), cfg.points_per_panel).on(grid);
    gap = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) gap = std::max(gap, std::abs(cur.values[i] - prev.values[i]));
    if (gap <= cfg.refinement_tolerance * std::max(1.0, cur.sup_abs())) return cur;
    prev = std::move(cur);
  }
  throw ToleranceNotMet("apply_J: refinement cap reached", prev.values.back(), gap);
}

/// u″(t) = ∫_t^1 (s − t) v(s) ds for the solution of u'''' = v.
template <class F>
double curvature_from_rhs(F&& v, double t, const QuadratureConfig& cfg = {}, std::span<const double> kinks = {}) {
  detail::require_unit(t, "curvature_from_rhs");
  if (t >= 1.0) return 0.0;
  return integrate_split([&](double s) { return (s - t) * v(s); }, t, 1.0, kinks, cfg).value;
}

/// ‖J χ_[a,1]‖_{L²}: L² norm of J applied to the indicator of [a,1].
inline double indicator_image_l2(double a, const QuadratureConfig& cfg = {}) {
  detail::require_unit(a, "indicator_image_l2");
  const double cut = a;
  JAction ja([cut](double s) { return s >= cut ? 1.0 : 0.0; }, detail::panel_cuts(cfg.panels, std::span(&cut, 1)), 4);
  const double sq = integrate_split(
                        [&](double t) {
                          const double x = ja.u(t);
                          return x * x;
                        },
                        0.0, 1.0, std::span(&cut, 1), cfg)
                        .value;
  return std::sqrt(sq);
}

}  // namespace cantilever
