#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cantilever/errors.hpp"

namespace cantilever {

/// Uniform partition of [0,1] into `panels` equal subintervals.
class Grid {
 public:
  explicit Grid(int panels = 256) : panels_(panels) {
    if (panels < 1) throw PreconditionError("Grid: panels must be positive");
    nodes_.resize(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) nodes_[static_cast<std::size_t>(i)] = static_cast<double>(i) / panels;
  }

  int panels() const noexcept { return panels_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double h() const noexcept { return 1.0 / panels_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Index of the panel containing t (the last panel owns t = 1).
  std::size_t panel_of(double t) const noexcept {
    if (t <= 0.0) return 0;
    auto k = static_cast<std::size_t>(t * panels_);
    return k >= static_cast<std::size_t>(panels_) ? static_cast<std::size_t>(panels_) - 1 : k;
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.panels_ == b.panels_; }

 private:
  int panels_;
  std::vector<double> nodes_;
};

/// Node samples of a function on a Grid, read as its piecewise-linear interpolant.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() : grid(1), values(2, 0.0) {}
  GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size())
      throw PreconditionError("GridFunction: expected " + std::to_string(grid.size()) + " values, got " +
                              std::to_string(values.size()));
    for (double x : values)
      if (!std::isfinite(x)) throw PreconditionError("GridFunction: non-finite sample");
  }

  template <class F>
  static GridFunction sample(const Grid& g, F&& fn) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g[i]);
    return GridFunction(g, std::move(v));
  }

  static GridFunction zeros(const Grid& g) { return GridFunction(g, std::vector<double>(g.size(), 0.0)); }

  std::size_t size() const noexcept { return values.size(); }

  /// Piecewise-linear interpolant.
  double operator()(double t) const {
    const std::size_t k = grid.panel_of(t);
    const double a = grid[k];
    const double s = (t - a) * grid.panels();
    return (1.0 - s) * values[k] + s * values[k + 1];
  }

  double sup_abs() const noexcept {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
  }

  /// Exact L² norm of the piecewise-linear interpolant.
  double l2_norm() const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double a = values[i], b = values[i + 1];
      acc += (a * a + a * b + b * b) / 3.0;
    }
    return std::sqrt(acc * grid.h());
  }
};

inline GridFunction operator*(double a, GridFunction f) {
  for (double& x : f.values) x *= a;
  return f;
}

struct QuadratureConfig {
  int panels = 256;
  int points_per_panel = 8;
  double refinement_tolerance = 1e-10;
  int max_doublings = 6;

  void validate() const {
    if (panels < 1) throw PreconditionError("QuadratureConfig: panels must be positive");
    if (points_per_panel < 2) throw PreconditionError("QuadratureConfig: points_per_panel must be >= 2");
    if (!(refinement_tolerance > 0.0)) throw PreconditionError("QuadratureConfig: refinement_tolerance must be > 0");
  }
};

}  // namespace cantilever
