#pragma once

// Composite Gauss–Legendre quadrature with panel doubling.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"

namespace cantilever {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

namespace detail {

inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

inline constexpr int kMaxGaussPoints = 64;

}  // namespace detail

/// n-point Gauss–Legendre rule on [-1,1], 1 <= n <= 64. Tables are built once.
inline const GaussRule& gauss_legendre(int n) {
  static const auto table = [] {
    std::array<GaussRule, detail::kMaxGaussPoints + 1> t;
    for (int k = 1; k <= detail::kMaxGaussPoints; ++k) t[static_cast<std::size_t>(k)] = detail::make_gauss_rule(k);
    return t;
  }();
  if (n < 1 || n > detail::kMaxGaussPoints) throw PreconditionError("gauss_legendre: unsupported order");
  return table[static_cast<std::size_t>(n)];
}

/// Single-interval Gauss–Legendre sum of g over [a,b].
template <class F>
double gauss_interval(F&& g, double a, double b, int points) {
  const GaussRule& r = gauss_legendre(points);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t q = 0; q < r.nodes.size(); ++q) acc += r.weights[q] * g(mid + half * r.nodes[q]);
  return acc * half;
}

/// Composite rule with `panels` equal panels on [a,b].
template <class F>
double gauss_composite(F&& g, double a, double b, int panels, int points) {
  if (b <= a) return 0.0;
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * h;
    acc += gauss_interval(g, lo, hi, points);
  }
  return acc;
}

struct QuadratureResult {
  double value = 0.0;
  double gap = 0.0;  // |last − previous| at the final doubling
  int panels = 0;
};

/// Composite Gauss–Legendre with successive panel doubling, starting from
/// cfg.panels, until two consecutive estimates agree to cfg.refinement_tolerance
/// (absolute, scaled by max(1,|value|)). Throws ToleranceNotMet at the cap.
template <class F>
QuadratureResult integrate(F&& g, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (a > b) throw PreconditionError("integrate: a > b");
  if (a == b) return {0.0, 0.0, cfg.panels};
  int panels = cfg.panels;
  double prev = gauss_composite(g, a, b, panels, cfg.points_per_panel);
  for (int d = 0; d < cfg.max_doublings; ++d) {
    panels *= 2;
    const double cur = gauss_composite(g, a, b, panels, cfg.points_per_panel);
    const double gap = std::abs(cur - prev);
    if (gap <= cfg.refinement_tolerance * std::max(1.0, std::abs(cur))) return {cur, gap, panels};
    prev = cur;
    if (!std::isfinite(cur)) break;
  }
  const double cur = gauss_composite(g, a, b, panels * 2, cfg.points_per_panel);
  throw ToleranceNotMet("integrate: refinement cap reached", cur, std::abs(cur - prev));
}

/// `integrate` applied on each sub-interval between sorted breakpoints inside (a,b).
/// Panels are distributed in proportion to sub-interval length (at least 1 each).
template <class F>
QuadratureResult integrate_split(F&& g, double a, double b, std::span<const double> breaks,
                                 const QuadratureConfig& cfg = {}) {
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureResult total{0.0, 0.0, 0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadratureConfig sub = cfg;
    sub.panels = std::max(1, static_cast<int>(std::ceil(cfg.panels * (cuts[i + 1] - cuts[i]) / (b - a))));
    const auto r = integrate(g, cuts[i], cuts[i + 1], sub);
    total.value += r.value;
    total.gap += r.gap;
    total.panels += r.panels;
  }
  return total;
}

}  // namespace cantilever
