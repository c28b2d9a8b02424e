#pragma once

// Energy E(u) = ½|u|² − ∫F(t,u) in the curvature variable w = u″.
// w is stored at grid nodes and read as a continuous piecewise-quadratic
// function on consecutive panel pairs; u(t) = ∫₀ᵗ (t−s) w(s) ds.
// The discrete energy is integrated by 8-point Gauss rules per element and
// energy_gradient is its exact L²(w) Riesz representative.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cantilever/eigenpair.hpp"
#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/kernel.hpp"
#include "cantilever/nonlinearity.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

struct CurvatureRepr {
  Grid grid;
  std::vector<double> w;

  CurvatureRepr() = default;
  CurvatureRepr(Grid g, std::vector<double> values) : grid(std::move(g)), w(std::move(values)) {
    if (w.size() != grid.size()) throw PreconditionError("CurvatureRepr: sample count does not match grid");
    for (double x : w)
      if (!std::isfinite(x)) throw PreconditionError("CurvatureRepr: non-finite sample");
  }
  template <class F>
  static CurvatureRepr sample(const Grid& g, F&& fn) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g[i]);
    return CurvatureRepr(g, std::move(v));
  }
  static CurvatureRepr zeros(const Grid& g) { return CurvatureRepr(g, std::vector<double>(g.size(), 0.0)); }
  std::size_t size() const noexcept { return w.size(); }
  Eigen::VectorXd vec() const { return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())); }
  static CurvatureRepr from(const Grid& g, const Eigen::VectorXd& v) {
    return CurvatureRepr(g, std::vector<double>(v.data(), v.data() + v.size()));
  }
};

inline CurvatureRepr operator*(double a, CurvatureRepr c) {
  for (double& x : c.w) x *= a;
  return c;
}

/// Precomputed reconstruction, mass matrix and quadrature for one grid.
class CurvatureSpace {
 public:
  static constexpr int kPoints = 8;

  explicit CurvatureSpace(const Grid& g) : grid_(g) {
    if (g.panels() % 2 != 0) throw PreconditionError("CurvatureSpace: panel count must be even");
    m_ = g.panels() / 2;
    H_ = 2.0 * g.h();
    n_ = static_cast<Eigen::Index>(g.size());
    alpha_ = {H_ / 6.0, 2.0 * H_ / 3.0, H_ / 6.0};
    beta_.resize(static_cast<std::size_t>(m_));
    for (int e = 0; e < m_; ++e) {
      const double a = e * H_;
      beta_[static_cast<std::size_t>(e)] = {a * alpha_[0], a * alpha_[1] + H_ * H_ / 3.0,
                                            a * alpha_[2] + H_ * H_ / 6.0};
    }
    const GaussRule& rule = gauss_legendre(kPoints);
    for (int e = 0; e < m_; ++e) {
      for (int i = 0; i < kPoints; ++i) {
        const double x = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(i)]);
        quad_.push_back(point(e, x));
        weights_.push_back(0.5 * H_ * rule.weights[static_cast<std::size_t>(i)]);
      }
    }
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (i == n_ - 1) nodes_.push_back(point(m_ - 1, 1.0));
      else nodes_.push_back(point(static_cast<int>(i / 2), (i % 2) * 0.5));
    }
    std::vector<Eigen::Triplet<double>> trip;
    const double loc[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};
    for (int e = 0; e < m_; ++e)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) trip.emplace_back(2 * e + k, 2 * e + l, H_ / 30.0 * loc[k][l]);
    M_.resize(n_, n_);
    M_.setFromTriplets(trip.begin(), trip.end());
    llt_.compute(M_);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("CurvatureSpace: mass matrix factorization failed");
  }

  CurvatureSpace(const CurvatureSpace&) = delete;
  CurvatureSpace& operator=(const CurvatureSpace&) = delete;

  const Grid& grid() const noexcept { return grid_; }
  Eigen::Index dofs() const noexcept { return n_; }
  std::size_t quad_size() const noexcept { return quad_.size(); }
  double quad_t(std::size_t q) const { return quad_[q].t; }
  double quad_weight(std::size_t q) const { return weights_[q]; }

  Eigen::VectorXd u_quad(const Eigen::VectorXd& w) const { return reconstruct(quad_, w); }
  Eigen::VectorXd u_nodes(const Eigen::VectorXd& w) const { return reconstruct(nodes_, w); }

  /// Tᵀv, the adjoint of w ↦ u at the quadrature points.
  Eigen::VectorXd u_quad_adjoint(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    std::vector<double> s0(static_cast<std::size_t>(m_) + 1, 0.0), s1(static_cast<std::size_t>(m_) + 1, 0.0);
    for (std::size_t q = 0; q < quad_.size(); ++q) {
      const ReconPoint& p = quad_[q];
      const double vq = v(static_cast<Eigen::Index>(q));
      s0[static_cast<std::size_t>(p.e)] += vq;
      s1[static_cast<std::size_t>(p.e)] += vq * p.t;
      for (int k = 0; k < 3; ++k) out(2 * p.e + k) += vq * (p.t * p.a[static_cast<std::size_t>(k)] - p.b[static_cast<std::size_t>(k)]);
    }
    double S0 = 0.0, S1 = 0.0;  // sums over elements strictly to the right
    for (int e = m_ - 1; e >= 0; --e) {
      const auto& be = beta_[static_cast<std::size_t>(e)];
      for (int k = 0; k < 3; ++k)
        out(2 * e + k) += alpha_[static_cast<std::size_t>(k)] * S1 - be[static_cast<std::size_t>(k)] * S0;
      S0 += s0[static_cast<std::size_t>(e)];
      S1 += s1[static_cast<std::size_t>(e)];
    }
    return out;
  }

  Eigen::VectorXd mass(const Eigen::VectorXd& w) const { return M_ * w; }
  Eigen::VectorXd mass_solve(const Eigen::VectorXd& d) const { return llt_.solve(d); }
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(M_ * b); }
  const Eigen::SparseMatrix<double>& mass_matrix() const noexcept { return M_; }

  /// ‖u‖_{L²} by the element Gauss rule (exact for piecewise-quadratic w).
  double l2_of_u(const Eigen::VectorXd& uq) const {
    double s = 0.0;
    for (std::size_t q = 0; q < quad_.size(); ++q) s += weights_[q] * uq(static_cast<Eigen::Index>(q)) * uq(static_cast<Eigen::Index>(q));
    return std::sqrt(s);
  }

  /// Dense reconstruction matrix T (quadrature points × dofs), built on first use.
  const Eigen::MatrixXd& recon_matrix() const {
    std::call_once(T_once_, [this] {
      T_.resize(static_cast<Eigen::Index>(quad_.size()), n_);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
      for (Eigen::Index j = 0; j < n_; ++j) {
        e(j) = 1.0;
        T_.col(j) = u_quad(e);
        e(j) = 0.0;
      }
    });
    return T_;
  }

 private:
  struct ReconPoint {
    int e;
    double t;
    std::array<double, 3> a, b;  // ∫ L_k and ∫ s L_k from the element start to t
  };

  ReconPoint point(int e, double x) const {
    const double a0 = e * H_;
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    const std::array<double, 3> il{2 * x3 / 3 - 1.5 * x2 + x, -4 * x3 / 3 + 2 * x2, 2 * x3 / 3 - 0.5 * x2};
    const std::array<double, 3> ixl{0.5 * x4 - x3 + 0.5 * x2, -x4 + 4 * x3 / 3, 0.5 * x4 - x3 / 3};
    ReconPoint p{e, std::min(1.0, a0 + H_ * x), {}, {}};
    for (std::size_t k = 0; k < 3; ++k) {
      p.a[k] = H_ * il[k];
      p.b[k] = a0 * p.a[k] + H_ * H_ * ixl[k];
    }
    return p;
  }

  Eigen::VectorXd reconstruct(const std::vector<ReconPoint>& pts, const Eigen::VectorXd& w) const {
    if (w.size() != n_) throw PreconditionError("CurvatureSpace: wrong coefficient count");
    std::vector<double> A(static_cast<std::size_t>(m_) + 1, 0.0), B(static_cast<std::size_t>(m_) + 1, 0.0);
    for (int e = 0; e < m_; ++e) {
      const auto& be = beta_[static_cast<std::size_t>(e)];
      double da = 0.0, db = 0.0;
      for (int k = 0; k < 3; ++k) {
        da += alpha_[static_cast<std::size_t>(k)] * w(2 * e + k);
        db += be[static_cast<std::size_t>(k)] * w(2 * e + k);
      }
      A[static_cast<std::size_t>(e) + 1] = A[static_cast<std::size_t>(e)] + da;
      B[static_cast<std::size_t>(e) + 1] = B[static_cast<std::size_t>(e)] + db;
    }
    Eigen::VectorXd u(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const ReconPoint& p = pts[i];
      double pa = A[static_cast<std::size_t>(p.e)], pb = B[static_cast<std::size_t>(p.e)];
      for (int k = 0; k < 3; ++k) {
        pa += p.a[static_cast<std::size_t>(k)] * w(2 * p.e + k);
        pb += p.b[static_cast<std::size_t>(k)] * w(2 * p.e + k);
      }
      u(static_cast<Eigen::Index>(i)) = p.t * pa - pb;
    }
    return u;
  }

  Grid grid_;
  int m_ = 0;
  double H_ = 0.0;
  Eigen::Index n_ = 0;
  std::array<double, 3> alpha_{};
  std::vector<std::array<double, 3>> beta_;
  std::vector<ReconPoint> quad_, nodes_;
  std::vector<double> weights_;
  Eigen::SparseMatrix<double> M_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  mutable std::once_flag T_once_;
  mutable Eigen::MatrixXd T_;
};

/// Shared space for a grid; built once per panel count.
inline std::shared_ptr<const CurvatureSpace> curvature_space(const Grid& g) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const CurvatureSpace>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[g.panels()];
  if (!slot) slot = std::make_shared<const CurvatureSpace>(g);
  return slot;
}

inline GridFunction u_from_curvature(const CurvatureRepr& w) {
  const auto sp = curvature_space(w.grid);
  const Eigen::VectorXd u = sp->u_nodes(w.vec());
  return GridFunction(w.grid, std::vector<double>(u.data(), u.data() + u.size()));
}

struct VarNorms {
  double energetic = 0.0;
  double L2_of_u = 0.0;
  double sup_of_u = 0.0;
};

inline VarNorms norms(const CurvatureRepr& w) {
  const auto sp = curvature_space(w.grid);
  const Eigen::VectorXd v = w.vec();
  const Eigen::VectorXd uq = sp->u_quad(v);
  VarNorms n;
  n.energetic = std::sqrt(std::max(0.0, sp->inner(v, v)));
  n.L2_of_u = sp->l2_of_u(uq);
  n.sup_of_u = std::max(uq.cwiseAbs().maxCoeff(), sp->u_nodes(v).cwiseAbs().maxCoeff());
  return n;
}

inline double l2_inner(const CurvatureRepr& a, const CurvatureRepr& b) {
  if (!(a.grid == b.grid)) throw PreconditionError("l2_inner: grids differ");
  return curvature_space(a.grid)->inner(a.vec(), b.vec());
}

namespace detail {

struct EnergyEval {
  double E = 0.0;
  Eigen::VectorXd d;   // Euclidean gradient in the coefficients: Mw − Tᵀ(ω f(u))
  Eigen::VectorXd uq;
};

inline EnergyEval evaluate(const CurvatureSpace& sp, const NonlinearitySpec& spec, const Eigen::VectorXd& w,
                           bool with_gradient) {
  EnergyEval r;
  r.uq = sp.u_quad(w);
  const Eigen::VectorXd Mw = sp.mass(w);
  double pot = 0.0;
  Eigen::VectorXd fw(r.uq.size());
  for (std::size_t q = 0; q < sp.quad_size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    const double t = sp.quad_t(q), u = r.uq(qi), om = sp.quad_weight(q);
    pot += om * spec.F(t, u);
    if (with_gradient) fw(qi) = om * spec.f(t, u);
  }
  r.E = 0.5 * w.dot(Mw) - pot;
  if (with_gradient) r.d = Mw - sp.u_quad_adjoint(fw);
  return r;
}

inline double slope_at(const NonlinearitySpec& spec, double t, double u) {
  double d = spec.dfdu(t, u);
  if (!std::isfinite(d)) {
    const double h = 1e-8 * std::max(1.0, std::abs(u));
    d = (spec.f(t, std::max(u, 0.0) + h) - spec.f(t, std::max(u, 0.0))) / h;
  }
  return d;
}

}  // namespace detail

inline double energy(const NonlinearitySpec& spec, const CurvatureRepr& w) {
  return detail::evaluate(*curvature_space(w.grid), spec, w.vec(), false).E;
}

/// L²(w) representative g of E′: ⟨g, δw⟩ equals the directional derivative of the discrete energy.
inline CurvatureRepr energy_gradient(const NonlinearitySpec& spec, const CurvatureRepr& w) {
  const auto sp = curvature_space(w.grid);
  const auto ev = detail::evaluate(*sp, spec, w.vec(), true);
  return CurvatureRepr::from(w.grid, sp->mass_solve(ev.d));
}

/// Curvature of φ₁/|φ₁|, scaled to unit discrete energetic norm.
inline CurvatureRepr normalized_phi_curvature(const Grid& g) {
  const double b = solve_beta(1e-14);
  auto c = CurvatureRepr::sample(g, [b](double t) { return phi1(b, t, 2); });
  const double n = norms(c).energetic;
  return (1.0 / n) * c;
}

/// ‖φ₁‖_{L²}/|φ₁|, the L² norm of the normalized first eigenfunction.
inline double phi_normalized_l2() {
  static const double v = [] {
    const double b = solve_beta(1e-14);
    const double l2 = std::sqrt(integrate([b](double t) { const double p = phi1(b, t, 0); return p * p; }, 0.0, 1.0).value);
    return l2 / phi1_energetic_norm(b);
  }();
  return v;
}

enum class ConeVariant { M0Energetic, MSup, ML2 };

inline std::string_view to_string(ConeVariant v) {
  switch (v) {
    case ConeVariant::M0Energetic: return "M0-energetic";
    case ConeVariant::MSup: return "M-sup";
    case ConeVariant::ML2: return "M-L2";
  }
  return "?";
}

struct ConeReport {
  bool convex_ok = true;
  std::optional<std::size_t> convex_witness;  // first node with w < −1e-9
  bool harnack_ok = true;
  std::vector<double> slack;  // u(t_i) − minorant(t_i)·norm
  std::size_t worst_node = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  bool member() const noexcept { return convex_ok && harnack_ok; }
};

inline ConeReport cone_membership(const CurvatureRepr& w, ConeVariant variant) {
  ConeReport r;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.w[i] < -1e-9) {
      r.convex_ok = false;
      r.convex_witness = i;
      break;
    }
  }
  const auto n = norms(w);
  const auto u = u_from_curvature(w);
  Minorant kind = Minorant::M;
  double scale = n.sup_of_u;
  if (variant == ConeVariant::M0Energetic) {
    kind = Minorant::M0;
    scale = n.energetic;
  } else if (variant == ConeVariant::ML2) {
    scale = n.L2_of_u;
  }
  r.slack.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.slack[i] = u.values[i] - minorant(kind, w.grid[i]) * scale;
    if (r.slack[i] < r.worst_slack) {
      r.worst_slack = r.slack[i];
      r.worst_node = i;
    }
  }
  r.harnack_ok = r.worst_slack >= -1e-9;
  return r;
}

enum class ShellVariant { Energetic, TwoNorm };

inline std::string_view to_string(ShellVariant v) { return v == ShellVariant::Energetic ? "energetic" : "two_norm"; }

/// Energetic: R0 ≤ |u| ≤ R1. TwoNorm: ‖u‖_{L²} ≥ R0 and |u| ≤ R1.
struct ShellSpec {
  ShellVariant variant = ShellVariant::Energetic;
  double R0 = 0.0;
  double R1 = 0.0;

  void validate() const {
    if (!(R0 > 0.0) || !std::isfinite(R1)) throw PreconditionError("shell: need 0 < R0 and finite R1");
    if (variant == ShellVariant::Energetic && !(R0 < R1)) throw PreconditionError("shell: need R0 < R1");
    if (variant == ShellVariant::TwoNorm && !(R0 < phi_normalized_l2() * R1))
      throw PreconditionError("shell: need R0 < ‖φ‖·R1 for the two-norm shell");
  }
};

enum class CriticalKind { Minimizer, MountainPass };

inline std::string_view to_string(CriticalKind k) { return k == CriticalKind::Minimizer ? "minimizer" : "mountain_pass"; }

struct CriticalPointReport {
  CurvatureRepr point;
  double energy = 0.0;
  double projected_gradient_norm = 0.0;
  CriticalKind kind = CriticalKind::Minimizer;
  double estimate_m_or_c = 0.0;
  bool inner_active = false;
  bool outer_active = false;
  std::vector<CurvatureRepr> path;
  std::vector<double> path_energies;
  VarNorms point_norms;
  bool converged = false;
  bool interior_pass = true;  // mountain pass: false when the path maximum sits at an endpoint
  bool polished = false;      // final Newton refinement accepted
  int iterations = 0;
  std::string message;
};

struct DescentOptions {
  double armijo = 1e-4;
  int max_iterations = 10000;
  int polish_every = 50;
  double polish_trigger = 1e-2;  // try Newton once the projected gradient is below this
  bool polish = true;
  // mountain pass
  double path_step = 0.5;
  int max_sweeps = 4000;
  int patience = 400;
};

namespace detail {

struct Constraint {
  ShellVariant variant = ShellVariant::Energetic;
  double R0 = 0.0, R1 = 0.0;
  bool sphere() const noexcept { return variant == ShellVariant::Energetic && R0 == R1; }
};

inline double inner_measure(const CurvatureSpace& sp, const Constraint& c, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& uq) {
  return c.variant == ShellVariant::Energetic ? std::sqrt(std::max(0.0, sp.inner(w, w))) : sp.l2_of_u(uq);
}

/// Clip to w ≥ 0, then scale radially into the shell. nullopt when infeasible.
inline std::optional<Eigen::VectorXd> retract(const CurvatureSpace& sp, const Constraint& c, Eigen::VectorXd w) {
  w = w.cwiseMax(0.0);
  double e = std::sqrt(std::max(0.0, sp.inner(w, w)));
  if (!(e > 0.0)) return std::nullopt;
  if (c.variant == ShellVariant::Energetic) {
    if (c.sphere() || e < c.R0) w *= c.R0 / e;
    else if (e > c.R1) w *= c.R1 / e;
    return w;
  }
  const double l = sp.l2_of_u(sp.u_quad(w));
  if (!(l > 0.0)) return std::nullopt;
  if (l < c.R0) {
    w *= c.R0 / l;
    e *= c.R0 / l;
  }
  if (e > c.R1) {
    w *= c.R1 / e;
    if (sp.l2_of_u(sp.u_quad(w)) < c.R0 * (1.0 - 1e-12)) return std::nullopt;
  }
  return w;
}

struct ActiveSet {
  bool inner = false, outer = false;
};

inline ActiveSet active_constraints(const CurvatureSpace& sp, const Constraint& c, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& uq) {
  ActiveSet a;
  const double e = std::sqrt(std::max(0.0, sp.inner(w, w)));
  a.inner = std::abs(inner_measure(sp, c, w, uq) - c.R0) <= 1e-9 * c.R0;
  a.outer = std::abs(e - c.R1) <= 1e-9 * c.R1;
  return a;
}

/// Euclidean normal of the inner constraint (∇ of ½·measure²).
inline Eigen::VectorXd inner_normal(const CurvatureSpace& sp, const Constraint& c, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& uq) {
  if (c.variant == ShellVariant::Energetic) return sp.mass(w);
  Eigen::VectorXd v(uq.size());
  for (std::size_t q = 0; q < sp.quad_size(); ++q)
    v(static_cast<Eigen::Index>(q)) = sp.quad_weight(q) * uq(static_cast<Eigen::Index>(q));
  return sp.u_quad_adjoint(v);
}

struct Kkt {
  double pg = 0.0;
  std::vector<bool> box;  // coefficient held at 0
  std::optional<Eigen::VectorXd> normal;  // binding sphere normal
  bool inner = false, outer = false;
  double target = 0.0;   // radius of the binding sphere
};

/// Projected gradient in the dual norm: zero where w = 0 pushes outward, then
/// remove the component along a binding sphere normal. Vanishes at KKT points.
inline Kkt projected_gradient(const CurvatureSpace& sp, const Constraint& c, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& uq, const Eigen::VectorXd& d) {
  Kkt k;
  Eigen::VectorXd r = d;
  k.box.assign(static_cast<std::size_t>(w.size()), false);
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) <= 0.0 && r(j) > 0.0) {
      r(j) = 0.0;
      k.box[static_cast<std::size_t>(j)] = true;
    }
  }
  const ActiveSet a = active_constraints(sp, c, w, uq);
  auto remove = [&](const Eigen::VectorXd& n, bool require_positive) {
    const Eigen::VectorXd Mn = sp.mass_solve(n);
    const double rn = r.dot(Mn), nn = n.dot(Mn);
    if (!(nn > 0.0)) return false;
    if (require_positive ? rn <= 0.0 : rn >= 0.0) return false;
    r -= (rn / nn) * n;
    return true;
  };
  if (c.sphere()) {
    Eigen::VectorXd n = sp.mass(w);
    const Eigen::VectorXd Mn = sp.mass_solve(n);
    r -= (r.dot(Mn) / n.dot(Mn)) * n;
    k.normal = n;
    k.inner = k.outer = true;
    k.target = c.R0;
  } else {
    if (a.inner) {
      Eigen::VectorXd n = inner_normal(sp, c, w, uq);
      if (remove(n, true)) {
        k.normal = n;
        k.inner = true;
        k.target = c.R0;
      }
    }
    if (a.outer && !k.normal) {
      Eigen::VectorXd n = sp.mass(w);
      if (remove(n, false)) {
        k.normal = n;
        k.outer = true;
        k.target = c.R1;
      }
    }
  }
  k.pg = std::sqrt(std::max(0.0, r.dot(sp.mass_solve(r))));
  return k;
}

struct Point {
  Eigen::VectorXd w;
  EnergyEval ev;
  Kkt kkt;
};

inline Point make_point(const CurvatureSpace& sp, const NonlinearitySpec& spec, const Constraint& c, Eigen::VectorXd w) {
  Point p;
  p.ev = evaluate(sp, spec, w, true);
  p.kkt = projected_gradient(sp, c, w, p.ev.uq, p.ev.d);
  p.w = std::move(w);
  return p;
}

/// Newton refinement of a near-critical point. Box-held coefficients stay at 0;
/// a binding sphere is kept through a Lagrange multiplier. Requires the dense
/// reconstruction matrix, so it is skipped above 1025 coefficients.
inline std::optional<Point> newton_polish(const CurvatureSpace& sp, const NonlinearitySpec& spec, const Constraint& c,
                                          const Point& start, double tol, int maxit = 30) {
  if (sp.dofs() > 1025) return std::nullopt;
  const Eigen::MatrixXd& T = sp.recon_matrix();
  const Eigen::MatrixXd Md = Eigen::MatrixXd(sp.mass_matrix());
  Point p = start;
  for (int it = 0; it < maxit && !(p.kkt.pg < 0.01 * tol); ++it) {
    std::vector<Eigen::Index> freeidx;
    for (Eigen::Index j = 0; j < p.w.size(); ++j)
      if (!p.kkt.box[static_cast<std::size_t>(j)]) freeidx.push_back(j);
    const auto nf = static_cast<Eigen::Index>(freeidx.size());
    if (nf == 0) return std::nullopt;

    Eigen::VectorXd cq(static_cast<Eigen::Index>(sp.quad_size()));
    for (std::size_t q = 0; q < sp.quad_size(); ++q)
      cq(static_cast<Eigen::Index>(q)) = sp.quad_weight(q) * slope_at(spec, sp.quad_t(q), p.ev.uq(static_cast<Eigen::Index>(q)));
    Eigen::MatrixXd TF(T.rows(), nf);
    for (Eigen::Index j = 0; j < nf; ++j) TF.col(j) = T.col(freeidx[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd Hff(nf, nf);
    for (Eigen::Index a = 0; a < nf; ++a)
      for (Eigen::Index b = 0; b < nf; ++b) Hff(a, b) = Md(freeidx[static_cast<std::size_t>(a)], freeidx[static_cast<std::size_t>(b)]);
    Hff.noalias() -= TF.transpose() * cq.asDiagonal() * TF;
    Eigen::VectorXd dF(nf);
    for (Eigen::Index j = 0; j < nf; ++j) dF(j) = p.ev.d(freeidx[static_cast<std::size_t>(j)]);

    Eigen::VectorXd stepF;
    if (p.kkt.normal) {
      const Eigen::VectorXd& n = *p.kkt.normal;
      const double mu = n.dot(sp.mass_solve(p.ev.d)) / n.dot(sp.mass_solve(n));
      // constraint ½(m(w)² − R²); its Hessian is M (energetic) or TᵀΩT (L² of u)
      Eigen::MatrixXd C(nf, nf);
      if (c.variant == ShellVariant::Energetic || p.kkt.outer) {
        for (Eigen::Index a = 0; a < nf; ++a)
          for (Eigen::Index b = 0; b < nf; ++b) C(a, b) = Md(freeidx[static_cast<std::size_t>(a)], freeidx[static_cast<std::size_t>(b)]);
      } else {
        Eigen::VectorXd om(static_cast<Eigen::Index>(sp.quad_size()));
        for (std::size_t q = 0; q < sp.quad_size(); ++q) om(static_cast<Eigen::Index>(q)) = sp.quad_weight(q);
        C = TF.transpose() * om.asDiagonal() * TF;
      }
      const double meas = p.kkt.outer && !p.kkt.inner ? std::sqrt(sp.inner(p.w, p.w)) : inner_measure(sp, c, p.w, p.ev.uq);
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
      K.topLeftCorner(nf, nf) = Hff - mu * C;
      Eigen::VectorXd rhs(nf + 1);
      for (Eigen::Index j = 0; j < nf; ++j) {
        const double nj = n(freeidx[static_cast<std::size_t>(j)]);
        K(j, nf) = -nj;
        K(nf, j) = nj;
        rhs(j) = -(dF(j) - mu * nj);
      }
      rhs(nf) = -0.5 * (meas * meas - p.kkt.target * p.kkt.target);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
      if (!(lu.rcond() > 1e-14)) return std::nullopt;
      stepF = lu.solve(rhs).head(nf);
    } else {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(Hff);
      if (!(lu.rcond() > 1e-14)) return std::nullopt;
      stepF = lu.solve(-dF);
    }
    Eigen::VectorXd step = Eigen::VectorXd::Zero(p.w.size());
    for (Eigen::Index j = 0; j < nf; ++j) step(freeidx[static_cast<std::size_t>(j)]) = stepF(j);

    bool moved = false;
    for (double lambda = 1.0; lambda > 1e-3; lambda *= 0.5) {
      auto trial = retract(sp, c, p.w + lambda * step);
      if (!trial) continue;
      Point q = make_point(sp, spec, c, std::move(*trial));
      if (q.kkt.pg < p.kkt.pg) {
        p = std::move(q);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return p;
}

struct DescentResult {
  Point point;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  std::string message;
};

inline DescentResult descend(const CurvatureSpace& sp, const NonlinearitySpec& spec, const Constraint& c,
                             Eigen::VectorXd w0, double tol, const DescentOptions& opt) {
  DescentResult res;
  Point p = make_point(sp, spec, c, std::move(w0));
  int k = 0;
  auto try_polish = [&]() {
    if (!opt.polish) return false;
    auto q = newton_polish(sp, spec, c, p, tol);
    if (!q) return false;
    if (q->kkt.pg < p.kkt.pg && q->ev.E <= p.ev.E + 1e-10 * std::max(1.0, std::abs(p.ev.E))) {
      p = std::move(*q);
      res.polished = true;
      return p.kkt.pg < tol;
    }
    return false;
  };
  for (; k < opt.max_iterations; ++k) {
    if (p.kkt.pg < tol) break;
    if (k > 0 && k % opt.polish_every == 0 && p.kkt.pg < opt.polish_trigger && try_polish()) break;
    const Eigen::VectorXd g = sp.mass_solve(p.ev.d);
    bool accepted = false;
    for (double eta = 1.0; eta > 1e-14; eta *= 0.5) {
      auto trial = retract(sp, c, p.w - eta * g);
      if (!trial) continue;
      const auto ev = evaluate(sp, spec, *trial, false);
      const double pred = p.ev.d.dot(*trial - p.w);
      if (ev.E <= p.ev.E + opt.armijo * std::min(0.0, pred) && ev.E <= p.ev.E) {
        if ((*trial - p.w).lpNorm<Eigen::Infinity>() == 0.0) break;
        p = make_point(sp, spec, c, std::move(*trial));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = "line search stagnated";
      break;
    }
  }
  if (!(p.kkt.pg < tol)) try_polish();
  res.converged = p.kkt.pg < tol;
  if (res.converged) res.message.clear();
  else if (res.message.empty()) res.message = "iteration limit reached";
  res.iterations = k;
  res.point = std::move(p);
  return res;
}

inline Constraint constraint_of(const ShellSpec& s) { return Constraint{s.variant, s.R0, s.R1}; }

inline void fill_report(const CurvatureSpace& sp, const Constraint& c, const Point& p, CriticalPointReport& r) {
  r.point = CurvatureRepr::from(sp.grid(), p.w);
  r.energy = p.ev.E;
  r.estimate_m_or_c = p.ev.E;
  r.projected_gradient_norm = p.kkt.pg;
  const ActiveSet a = active_constraints(sp, c, p.w, p.ev.uq);
  r.inner_active = a.inner;
  r.outer_active = a.outer;
  r.point_norms = norms(r.point);
}

}  // namespace detail

/// Projected-gradient descent in the shell from each start; returns the lowest energy found.
inline CriticalPointReport minimize_in_shell(const NonlinearitySpec& spec, const ShellSpec& shell,
                                             const std::vector<CurvatureRepr>& starts, double tol = 1e-6,
                                             const DescentOptions& opt = {}) {
  shell.validate();
  if (starts.empty()) throw PreconditionError("minimize_in_shell: no starts");
  if (!(tol > 0.0)) throw PreconditionError("minimize_in_shell: tol must be positive");
  const auto sp = curvature_space(starts.front().grid);
  const auto c = detail::constraint_of(shell);
  std::optional<detail::DescentResult> best;
  for (const auto& s : starts) {
    if (!(s.grid == sp->grid())) throw PreconditionError("minimize_in_shell: starts on different grids");
    auto w = detail::retract(*sp, c, s.vec());
    if (!w) continue;
    auto r = detail::descend(*sp, spec, c, std::move(*w), tol, opt);
    if (!best || r.point.ev.E < best->point.ev.E) best = std::move(r);
  }
  if (!best) throw InfeasibleShell("minimize_in_shell: no start can be retracted into the shell");
  CriticalPointReport rep;
  rep.kind = CriticalKind::Minimizer;
  detail::fill_report(*sp, c, best->point, rep);
  rep.converged = best->converged;
  rep.polished = best->polished;
  rep.iterations = best->iterations;
  rep.message = best->message;
  return rep;
}

namespace detail {

inline double m_dist(const CurvatureSpace& sp, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd d = a - b;
  return std::sqrt(std::max(0.0, sp.inner(d, d)));
}

/// Equal-arc redistribution of path[i0..i1] (endpoints fixed) in the L²(w) metric.
inline void reparametrize(const CurvatureSpace& sp, const Constraint& c, std::vector<Eigen::VectorXd>& path,
                          std::size_t i0, std::size_t i1) {
  if (i1 <= i0 + 1) return;
  std::vector<double> L{0.0};
  for (std::size_t i = i0; i < i1; ++i) L.push_back(L.back() + m_dist(sp, path[i], path[i + 1]));
  if (!(L.back() > 0.0)) return;
  std::vector<Eigen::VectorXd> old(path.begin() + static_cast<std::ptrdiff_t>(i0),
                                   path.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
  const std::size_t segs = i1 - i0;
  std::size_t s = 0;
  for (std::size_t k = 1; k < segs; ++k) {
    const double target = L.back() * static_cast<double>(k) / static_cast<double>(segs);
    while (s + 1 < segs && L[s + 1] < target) ++s;
    const double len = L[s + 1] - L[s];
    const double th = len > 0.0 ? (target - L[s]) / len : 0.0;
    Eigen::VectorXd v = (1.0 - th) * old[s] + th * old[s + 1];
    if (auto r = retract(sp, c, v)) path[i0 + k] = std::move(*r);
  }
}

}  // namespace detail

/// Climbing-image string method between w0 and w1, followed by Newton refinement
/// of the climbing image. Connectedness of the shell is not checked.
inline CriticalPointReport mountain_pass(const NonlinearitySpec& spec, const ShellSpec& shell, const CurvatureRepr& w0,
                                         const CurvatureRepr& w1, int path_points = 32, double tol = 1e-6,
                                         const DescentOptions& opt = {}) {
  shell.validate();
  if (path_points < 8) throw PreconditionError("mountain_pass: need at least 8 path points");
  if (!(w0.grid == w1.grid)) throw PreconditionError("mountain_pass: endpoints on different grids");
  const auto sp = curvature_space(w0.grid);
  const auto c = detail::constraint_of(shell);
  const Eigen::VectorXd a = w0.vec(), b = w1.vec();
  auto inside = [&](const Eigen::VectorXd& w) {
    auto r = detail::retract(*sp, c, w);
    return r && (*r - w).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, w.lpNorm<Eigen::Infinity>());
  };
  if (!inside(a) || !inside(b)) throw PreconditionError("mountain_pass: endpoints must lie in the shell");

  CriticalPointReport rep;
  rep.kind = CriticalKind::MountainPass;
  rep.message = "shell connectedness not checked";
  if ((a - b).lpNorm<Eigen::Infinity>() == 0.0) {
    const auto p = detail::make_point(*sp, spec, c, a);
    detail::fill_report(*sp, c, p, rep);
    rep.interior_pass = false;
    rep.path = {w0};
    rep.path_energies = {p.ev.E};
    rep.message = "zero-length path; " + rep.message;
    return rep;
  }

  const auto P = static_cast<std::size_t>(path_points);
  std::vector<Eigen::VectorXd> path(P);
  path.front() = a;
  path.back() = b;
  for (std::size_t i = 1; i + 1 < P; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(P - 1);
    auto r = detail::retract(*sp, c, (1.0 - s) * a + s * b);
    path[i] = r ? *r : (s < 0.5 ? a : b);
  }

  std::vector<double> E(P);
  std::vector<Eigen::VectorXd> D(P);
  auto refresh = [&](std::size_t i) {
    auto ev = detail::evaluate(*sp, spec, path[i], true);
    E[i] = ev.E;
    D[i] = std::move(ev.d);
  };
  for (std::size_t i = 0; i < P; ++i) refresh(i);
  // A path whose maximum is an endpoint already attains the minimax value.
  const bool endpoint_start = *std::max_element(E.begin() + 1, E.end() - 1) <= std::max(E.front(), E.back());

  double best_pg = std::numeric_limits<double>::infinity();
  int since_best = 0, endpoint_sweeps = 0, sweep = 0;
  std::optional<detail::Point> found;
  for (; sweep < opt.max_sweeps && !endpoint_start; ++sweep) {
    std::size_t ci = 1;
    for (std::size_t i = 2; i + 1 < P; ++i)
      if (E[i] > E[ci]) ci = i;
    if (E[ci] < std::max(E.front(), E.back())) {
      if (++endpoint_sweeps >= opt.patience) break;
    } else {
      endpoint_sweeps = 0;
    }

    const auto cp = detail::make_point(*sp, spec, c, path[ci]);
    if (cp.kkt.pg < tol && E[ci] >= std::max(E.front(), E.back())) {
      found = cp;
      break;
    }
    if (cp.kkt.pg < best_pg * (1.0 - 1e-3)) {
      best_pg = cp.kkt.pg;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      break;
    }
    if (opt.polish && cp.kkt.pg < opt.polish_trigger && sweep % 10 == 0) {
      auto q = detail::newton_polish(*sp, spec, c, cp, tol);
      if (q && q->kkt.pg < tol && q->ev.E >= std::max(E.front(), E.back())) {
        found = std::move(*q);
        rep.polished = true;
        break;
      }
    }

    std::vector<std::size_t> order(P - 2);
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return E[x] > E[y]; });
    for (std::size_t i : order) {
      Eigen::VectorXd tau = path[i + 1] - path[i - 1];
      const double tn = std::sqrt(std::max(0.0, sp->inner(tau, tau)));
      const Eigen::VectorXd g = sp->mass_solve(D[i]);
      Eigen::VectorXd dir = -g;
      if (tn > 0.0) {
        tau /= tn;
        const double gt = sp->inner(g, tau);
        dir += (i == ci ? 2.0 : 1.0) * gt * tau;
      }
      if (auto r = detail::retract(*sp, c, path[i] + opt.path_step * dir)) {
        path[i] = std::move(*r);
        refresh(i);
      }
    }
    detail::reparametrize(*sp, c, path, 0, ci);
    detail::reparametrize(*sp, c, path, ci, P - 1);
    for (std::size_t i = 1; i + 1 < P; ++i) refresh(i);
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < P; ++i)
    if (E[i] > E[imax]) imax = i;
  const bool endpoint_max = imax == 0 || imax == P - 1;
  detail::Point best;
  if (found) {
    best = std::move(*found);
  } else if (endpoint_max) {
    best = detail::make_point(*sp, spec, c, path[imax]);
    rep.interior_pass = false;
    rep.message = "no interior pass: path maximum at an endpoint; " + rep.message;
  } else {
    best = detail::make_point(*sp, spec, c, path[imax]);
    if (opt.polish) {
      auto q = detail::newton_polish(*sp, spec, c, best, tol);
      if (q && q->kkt.pg < best.kkt.pg) {
        best = std::move(*q);
        rep.polished = true;
      }
    }
  }
  detail::fill_report(*sp, c, best, rep);
  rep.converged = rep.interior_pass && best.kkt.pg < tol;
  if (!rep.converged && rep.interior_pass) rep.message = "pass not resolved to tolerance; " + rep.message;
  rep.iterations = sweep;
  for (std::size_t i = 0; i < P; ++i) {
    rep.path.push_back(CurvatureRepr::from(sp->grid(), path[i]));
    rep.path_energies.push_back(E[i]);
  }
  return rep;
}

struct SphereInfResult {
  double value = 0.0;
  bool heuristic = true;  // an upper bound on the infimum, not a certified value
  CurvatureRepr point;
  int starts = 0;
  int converged_starts = 0;
};

/// Lowest energy found on {w ≥ 0, |u| = r} by multi-start projected descent.
/// Starts: the normalized eigenfunction curvature, then seeded random w ≥ 0.
inline SphereInfResult sphere_inf(const NonlinearitySpec& spec, double r, int starts = 8, double tol = 1e-6,
                                  const Grid& grid = Grid(256), std::uint64_t seed = 0, const DescentOptions& opt = {}) {
  if (!(r > 0.0)) throw PreconditionError("sphere_inf: r must be positive");
  if (starts < 1) throw PreconditionError("sphere_inf: need at least one start");
  const auto sp = curvature_space(grid);
  const detail::Constraint c{ShellVariant::Energetic, r, r};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SphereInfResult out;
  out.value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < starts; ++k) {
    Eigen::VectorXd w;
    if (k == 0) {
      w = normalized_phi_curvature(grid).vec();
    } else {
      w.resize(sp->dofs());
      for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = U(rng);
    }
    auto rw = detail::retract(*sp, c, w);
    if (!rw) continue;
    auto res = detail::descend(*sp, spec, c, std::move(*rw), tol, opt);
    ++out.starts;
    if (res.converged) ++out.converged_starts;
    if (res.point.ev.E < out.value) {
      out.value = res.point.ev.E;
      out.point = CurvatureRepr::from(grid, res.point.w);
    }
  }
  return out;
}

}  // namespace cantilever
