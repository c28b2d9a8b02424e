#pragma once

// Numerical checks of the existence and multiplicity hypotheses. Each check
// returns Certificates; a certificate passes only when its margin exceeds the
// estimated numerical error of the quantities it compares.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cantilever/errors.hpp"
#include "cantilever/grid.hpp"
#include "cantilever/kernel.hpp"
#include "cantilever/nonlinearity.hpp"
#include "cantilever/quadrature.hpp"
#include "cantilever/variational.hpp"

namespace cantilever {

enum class Hypothesis { h1, h2a, h2b, f2_lower, f2_upper, r0_alpha, r0_beta, H1a, H1b, h3_geometry, asymptotic };

inline std::string_view to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::h1: return "h1";
    case Hypothesis::h2a: return "h2a";
    case Hypothesis::h2b: return "h2b";
    case Hypothesis::f2_lower: return "f2_lower";
    case Hypothesis::f2_upper: return "f2_upper";
    case Hypothesis::r0_alpha: return "r0_alpha";
    case Hypothesis::r0_beta: return "r0_beta";
    case Hypothesis::H1a: return "H1a";
    case Hypothesis::H1b: return "H1b";
    case Hypothesis::h3_geometry: return "h3_geometry";
    case Hypothesis::asymptotic: return "asymptotic";
  }
  return "?";
}

enum class Verdict { PASS, FAIL };

inline std::string_view to_string(Verdict v) { return v == Verdict::PASS ? "PASS" : "FAIL"; }

/// lhs ≥ rhs (AtLeast) or lhs ≤ rhs (AtMost).
enum class Direction { AtLeast, AtMost };

struct Certificate {
  Hypothesis hypothesis = Hypothesis::h1;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // positive = satisfied
  Verdict verdict = Verdict::FAIL;
  bool heuristic = false;
  double quadrature_error_estimate = 0.0;
  std::vector<std::pair<std::string, double>> inputs;       // numeric echo, insertion order
  std::vector<std::pair<std::string, std::string>> labels;  // textual echo
  std::vector<std::string> notes;

  bool pass() const noexcept { return verdict == Verdict::PASS; }
  std::optional<std::string> label(std::string_view key) const {
    for (const auto& [k, v] : labels)
      if (k == key) return v;
    return std::nullopt;
  }
};

inline Certificate make_certificate(Hypothesis h, double lhs, double rhs, Direction dir, double error_estimate,
                                    bool heuristic) {
  Certificate c;
  c.hypothesis = h;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = dir == Direction::AtLeast ? lhs - rhs : rhs - lhs;
  c.quadrature_error_estimate = error_estimate;
  c.verdict = c.margin > error_estimate ? Verdict::PASS : Verdict::FAIL;
  c.heuristic = heuristic;
  c.labels.emplace_back("direction", dir == Direction::AtLeast ? "lhs >= rhs" : "lhs <= rhs");
  return c;
}

struct CertifyOptions {
  QuadratureConfig quadrature{};
  int monotone_samples = 129;
  std::optional<double> monotone_u_max;  // default: the spec's probe range
};

namespace detail {

/// Floor for the error of evaluating and comparing O(1) quantities in floating point.
inline double roundoff_floor(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct Estimated {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Estimated unit_integral(F&& g, std::span<const double> kinks, const QuadratureConfig& cfg) {
  const auto r = integrate_split(g, 0.0, 1.0, kinks, cfg);
  return {r.value, r.gap};
}

/// ‖Jv‖_{L²}, computed at cfg.panels and twice that; the difference is the error estimate.
inline Estimated j_image_l2(const std::function<double(double)>& v, std::span<const double> kinks,
                            const QuadratureConfig& cfg) {
  auto at = [&](int panels) {
    JAction ja(v, panel_cuts(panels, kinks), cfg.points_per_panel);
    return std::sqrt(integrate_split(
                         [&](double t) {
                           const double x = ja.u(t);
                           return x * x;
                         },
                         0.0, 1.0, kinks, cfg)
                         .value);
  };
  const double coarse = at(cfg.panels), fine = at(2 * cfg.panels);
  return {fine, std::abs(fine - coarse)};
}

inline void echo_spec(Certificate& c, const NonlinearitySpec& spec) { c.labels.emplace_back("nonlinearity", spec.text()); }

inline void require_h1(const Certificate& h1, const char* who) {
  if (!h1.pass())
    throw PreconditionError(std::string(who) + ": f fails the sampled monotonicity check (h1); witness worst drop " +
                            std::to_string(h1.lhs));
}

}  // namespace detail

/// Sampled check that f is nondecreasing in t and u on a lattice.
inline Certificate check_h1(const NonlinearitySpec& spec, const CertifyOptions& opt = {}) {
  const auto v = check_monotone(spec, opt.monotone_samples, opt.monotone_u_max);
  auto c = make_certificate(Hypothesis::h1, v.worst_drop, 1e-12, Direction::AtMost, 0.0, true);
  detail::echo_spec(c, spec);
  c.inputs = {{"samples", v.samples}, {"u_max", v.u_max}};
  c.notes.push_back("lattice check, not a proof");
  if (v.witness) {
    const auto& w = *v.witness;
    c.notes.push_back("decrease along " + std::string(1, w.axis) + ": f(" + std::to_string(w.t1) + "," +
                      std::to_string(w.u1) + ")=" + std::to_string(w.f1) + " > f(" + std::to_string(w.t2) + "," +
                      std::to_string(w.u2) + ")=" + std::to_string(w.f2));
  }
  return c;
}

/// (a) ∫M₀ f(t,M₀R₀) ≥ R₀ and (b) ∫M₁ f(t,M₁R₁) ≤ R₁.
inline std::pair<Certificate, Certificate> check_h2(const NonlinearitySpec& spec, double R0, double R1,
                                                    const CertifyOptions& opt = {}) {
  if (!(R0 > 0.0 && R0 < R1)) throw PreconditionError("check_h2: need 0 < R0 < R1");
  detail::require_h1(check_h1(spec, opt), "check_h2");
  const auto levels = spec.breakpoints();
  const auto& cfg = opt.quadrature;

  const auto ka = minorant_crossings(Minorant::M0, R0, levels);
  const auto ia = detail::unit_integral(
      [&](double t) {
        const double m = minorant(Minorant::M0, t);
        return m * spec.f(t, m * R0);
      },
      ka, cfg);
  auto a = make_certificate(Hypothesis::h2a, ia.value, R0, Direction::AtLeast,
                            ia.error + detail::roundoff_floor(ia.value, R0), false);

  const auto kb = minorant_crossings(Minorant::M1, R1, levels);
  const auto ib = detail::unit_integral(
      [&](double t) {
        const double m = minorant(Minorant::M1, t);
        return m * spec.f(t, m * R1);
      },
      kb, cfg);
  auto b = make_certificate(Hypothesis::h2b, ib.value, R1, Direction::AtMost,
                            ib.error + detail::roundoff_floor(ib.value, R1), false);

  for (Certificate* c : {&a, &b}) {
    detail::echo_spec(*c, spec);
    c->inputs = {{"R0", R0}, {"R1", R1}, {"panels", cfg.panels}};
    c->notes.push_back("conditional on h1 (sampled)");
  }
  return {a, b};
}

/// Lower growth threshold 1/((1−a)M₀(a)²).
inline double f2_lower_threshold(double a) {
  const double m = minorant(Minorant::M0, a);
  return 1.0 / ((1.0 - a) * m * m);
}

inline constexpr double kF2Upper = 15.0 / 4.0;
inline constexpr double kAsymptoticUpper = 45.0 / 8.0;

/// f(M₀(a)R₀)/(M₀(a)R₀) ≥ 1/((1−a)M₀(a)²) and f(2R₁/3)/R₁ ≤ 15/4, f autonomous.
inline std::pair<Certificate, Certificate> check_f2(const NonlinearitySpec& spec, double a, double R0, double R1,
                                                    const CertifyOptions& opt = {}) {
  if (!spec.autonomous()) throw PreconditionError("check_f2: nonlinearity must not depend on t");
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("check_f2: need 0 < a < 1");
  if (!(R0 > 0.0 && R0 < R1)) throw PreconditionError("check_f2: need 0 < R0 < R1");
  detail::require_h1(check_h1(spec, opt), "check_f2");
  const double tau = minorant(Minorant::M0, a) * R0;
  const double lo_lhs = spec.f(0.0, tau) / tau, lo_rhs = f2_lower_threshold(a);
  auto lo = make_certificate(Hypothesis::f2_lower, lo_lhs, lo_rhs, Direction::AtLeast,
                             detail::roundoff_floor(lo_lhs, lo_rhs), false);
  const double up_lhs = spec.f(0.0, 2.0 * R1 / 3.0) / R1;
  auto up = make_certificate(Hypothesis::f2_upper, up_lhs, kF2Upper, Direction::AtMost,
                             detail::roundoff_floor(up_lhs, kF2Upper), false);
  for (Certificate* c : {&lo, &up}) {
    detail::echo_spec(*c, spec);
    c->inputs = {{"a", a}, {"R0", R0}, {"R1", R1}};
    c->notes.push_back("conditional on h1 (sampled)");
    c->notes.push_back("no quadrature: error estimate is the evaluation roundoff allowance");
  }
  return {lo, up};
}

/// α ≤ (J f̲_α)(1) and β ≥ (J f̄_β)(1), envelopes over [M(t)·x, x].
inline std::pair<Certificate, Certificate> check_r0(const NonlinearitySpec& spec, double alphaK, double betaK,
                                                    const CertifyOptions& opt = {}) {
  if (!(alphaK > 0.0 && betaK > 0.0)) throw PreconditionError("check_r0: alphaK and betaK must be positive");
  if (alphaK == betaK) throw PreconditionError("check_r0: alphaK must differ from betaK");
  const auto& cfg = opt.quadrature;
  auto at_one = [](double s) { return green(1.0, s); };

  const auto ea = envelope(spec, alphaK, Minorant::M, alphaK);
  const auto ia = detail::unit_integral([&](double s) { return at_one(s) * ea.lower(s); }, ea.kinks, cfg);
  auto al = make_certificate(Hypothesis::r0_alpha, ia.value, alphaK, Direction::AtLeast,
                             ia.error + detail::roundoff_floor(ia.value, alphaK), false);

  const auto eb = envelope(spec, betaK, Minorant::M, betaK);
  const auto ib = detail::unit_integral([&](double s) { return at_one(s) * eb.upper(s); }, eb.kinks, cfg);
  auto be = make_certificate(Hypothesis::r0_beta, ib.value, betaK, Direction::AtMost,
                             ib.error + detail::roundoff_floor(ib.value, betaK), false);

  const std::string regime = alphaK < betaK ? "compression" : "expansion";
  for (Certificate* c : {&al, &be}) {
    detail::echo_spec(*c, spec);
    c->inputs = {{"alphaK", alphaK}, {"betaK", betaK}, {"panels", cfg.panels}};
    c->labels.emplace_back("regime", regime);
  }
  return {al, be};
}

/// (a) R₀ ≤ ‖Jg̲‖_{L²}, (b) R₁ ≥ c∞‖ḡ‖_{L¹}, envelopes over [M(t)R₀, c∞R₁].
inline std::pair<Certificate, Certificate> check_H1(const NonlinearitySpec& spec, double R0, double R1,
                                                    const CertifyOptions& opt = {}) {
  if (!(R0 > 0.0 && R0 < phi_normalized_l2() * R1))
    throw PreconditionError("check_H1: need 0 < R0 < ‖φ‖·R1 for the two-norm shell");
  // max_t M(t) = M(1) = c∞, so the interval is nonempty iff R1 ≥ R0.
  if (kSupEmbedding * R1 < minorant(Minorant::M, 1.0) * R0)
    throw PreconditionError("check_H1: empty envelope interval, c∞R1 < M(t)R0 at t = 1");
  const auto& cfg = opt.quadrature;
  const auto env = envelope(spec, R0, Minorant::M, kSupEmbedding * R1);

  const auto ia = detail::j_image_l2(env.lower, env.kinks, cfg);
  auto a = make_certificate(Hypothesis::H1a, ia.value, R0, Direction::AtLeast,
                            ia.error + detail::roundoff_floor(ia.value, R0), false);
  const auto ib = detail::unit_integral([&](double t) { return std::abs(env.upper(t)); }, env.kinks, cfg);
  const double lhs_b = kSupEmbedding * ib.value;
  auto b = make_certificate(Hypothesis::H1b, lhs_b, R1, Direction::AtMost,
                            kSupEmbedding * ib.error + detail::roundoff_floor(lhs_b, R1), false);
  for (Certificate* c : {&a, &b}) {
    detail::echo_spec(*c, spec);
    c->inputs = {{"R0", R0}, {"R1", R1}, {"c_inf", kSupEmbedding}, {"panels", cfg.panels}};
  }
  return {a, b};
}

/// Sufficient condition for (a) when f is autonomous: R₀ ≤ f(M(a)R₀)·‖Jχ_[a,1]‖.
inline Certificate check_H1_indicator(const NonlinearitySpec& spec, double R0, double a, const CertifyOptions& opt = {}) {
  if (!spec.autonomous()) throw PreconditionError("check_H1_indicator: nonlinearity must not depend on t");
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("check_H1_indicator: need 0 < a < 1");
  if (!(R0 > 0.0)) throw PreconditionError("check_H1_indicator: R0 must be positive");
  auto cfg2 = opt.quadrature;
  cfg2.panels *= 2;
  const double n1 = indicator_image_l2(a, opt.quadrature), n2 = indicator_image_l2(a, cfg2);
  const double fa = spec.f(0.0, minorant(Minorant::M, a) * R0);
  const double lhs = fa * n2;
  auto c = make_certificate(Hypothesis::H1a, lhs, R0, Direction::AtLeast,
                            fa * std::abs(n2 - n1) + detail::roundoff_floor(lhs, R0), false);
  detail::echo_spec(c, spec);
  c.inputs = {{"R0", R0}, {"a", a}, {"indicator_image_l2", n2}};
  c.labels.emplace_back("route", "indicator");
  return c;
}

namespace detail {

/// The same piecewise-quadratic curvature on a grid with twice the panels.
inline CurvatureRepr refine(const CurvatureRepr& w) {
  const Grid& g = w.grid;
  const std::size_t elements = static_cast<std::size_t>(g.panels()) / 2;
  return CurvatureRepr::sample(Grid(2 * g.panels()), [&](double t) {
    const auto nodes = g.nodes();
    std::size_t e = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin());
    e = std::min(e == 0 ? 0 : (e - 1) / 2, elements - 1);
    const double a = g[2 * e], b = g[2 * e + 2];
    const double x = (t - a) / (b - a);
    const double l0 = 2 * x * x - 3 * x + 1, l1 = -4 * x * x + 4 * x, l2 = 2 * x * x - x;
    return l0 * w.w[2 * e] + l1 * w.w[2 * e + 1] + l2 * w.w[2 * e + 2];
  });
}

inline bool in_shell(const ShellSpec& s, const CurvatureRepr& w) {
  for (double x : w.w)
    if (x < 0.0) return false;
  const auto n = norms(w);
  const double slack = 1e-9;
  if (n.energetic > s.R1 * (1 + slack)) return false;
  const double inner = s.variant == ShellVariant::Energetic ? n.energetic : n.L2_of_u;
  return inner >= s.R0 * (1 - slack);
}

}  // namespace detail

struct H3Options {
  int starts = 8;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  DescentOptions descent{};
};

/// max{E(u₀),E(u₁)} < inf over the r-sphere, the infimum taken from sphere_inf.
inline Certificate check_h3(const NonlinearitySpec& spec, const ShellSpec& shell, const CurvatureRepr& w0,
                            const CurvatureRepr& w1, double r, const H3Options& opt = {}) {
  shell.validate();
  if (!(w0.grid == w1.grid)) throw PreconditionError("check_h3: w0 and w1 live on different grids");
  const double n0 = norms(w0).energetic, n1 = norms(w1).energetic;
  if (!(n0 < r && r < n1))
    throw OrderingError("check_h3: need |u0| < r < |u1|", n0 < r ? 1 : 0, n0 < r ? n1 : n0);
  if (!detail::in_shell(shell, w0) || !detail::in_shell(shell, w1))
    throw PreconditionError("check_h3: u0 and u1 must lie in the shell");
  const double e0 = energy(spec, w0), e1 = energy(spec, w1);
  const double lhs = std::max(e0, e1);
  const double lhs_fine = std::max(energy(spec, detail::refine(w0)), energy(spec, detail::refine(w1)));
  const auto inf = sphere_inf(spec, r, opt.starts, opt.tol, w0.grid, opt.seed, opt.descent);
  auto c = make_certificate(Hypothesis::h3_geometry, lhs, inf.value, Direction::AtMost,
                            std::abs(lhs_fine - lhs) + 1e-8 * std::max({1.0, std::abs(lhs), std::abs(inf.value)}),
                            true);
  detail::echo_spec(c, spec);
  c.inputs = {{"r", r},         {"E_u0", e0},          {"E_u1", e1},
              {"norm_u0", n0},  {"norm_u1", n1},       {"R0", shell.R0},
              {"R1", shell.R1}, {"starts", opt.starts}, {"seed", static_cast<double>(opt.seed)},
              {"panels", w0.grid.panels()}};
  c.labels.emplace_back("shell", std::string(to_string(shell.variant)));
  c.notes.push_back("rhs is the lowest sphere energy found by multi-start descent, an upper bound on the infimum; "
                    "PASS is evidence, not proof");
  return c;
}

struct AsymptoticRow {
  double tau = 0.0;
  double ratio = 0.0;  // f(τ)/τ
  bool above_lower = false;
  bool below_upper = false;
};

struct AsymptoticReport {
  double a = 0.0;
  double lower_threshold = 0.0;
  double upper_threshold = kAsymptoticUpper;
  std::vector<AsymptoticRow> rows;
  bool lower_found = false;
  bool upper_found = false;
  std::vector<double> R0_candidates;  // τ = M₀(a)R₀
  std::vector<double> R1_candidates;  // τ = 2R₁/3
  Certificate lower, upper;
};

/// Tabulates f(τ)/τ against the two growth thresholds.
inline AsymptoticReport asymptotic_scan(const NonlinearitySpec& spec, double a, std::span<const double> tau_grid) {
  if (!spec.autonomous()) throw PreconditionError("asymptotic_scan: nonlinearity must not depend on t");
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("asymptotic_scan: need 0 < a < 1");
  if (tau_grid.empty()) throw PreconditionError("asymptotic_scan: empty tau grid");
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > 0.0) || (i > 0 && !(tau_grid[i] > tau_grid[i - 1])))
      throw PreconditionError("asymptotic_scan: tau grid must be positive and increasing");
  AsymptoticReport rep;
  rep.a = a;
  rep.lower_threshold = f2_lower_threshold(a);
  const double m0 = minorant(Minorant::M0, a);
  double best = -std::numeric_limits<double>::infinity(), least = std::numeric_limits<double>::infinity();
  for (double tau : tau_grid) {
    AsymptoticRow row{tau, spec.f(0.0, tau) / tau};
    row.above_lower = row.ratio >= rep.lower_threshold;
    row.below_upper = row.ratio <= rep.upper_threshold;
    if (row.above_lower) rep.R0_candidates.push_back(tau / m0);
    if (row.below_upper) rep.R1_candidates.push_back(1.5 * tau);
    rep.lower_found = rep.lower_found || row.above_lower;
    rep.upper_found = rep.upper_found || row.below_upper;
    best = std::max(best, row.ratio);
    least = std::min(least, row.ratio);
    rep.rows.push_back(row);
  }
  rep.lower = make_certificate(Hypothesis::asymptotic, best, rep.lower_threshold, Direction::AtLeast,
                               detail::roundoff_floor(best, rep.lower_threshold), true);
  rep.upper = make_certificate(Hypothesis::asymptotic, least, rep.upper_threshold, Direction::AtMost,
                               detail::roundoff_floor(least, rep.upper_threshold), true);
  for (auto [c, side] : {std::pair{&rep.lower, "lower"}, std::pair{&rep.upper, "upper"}}) {
    detail::echo_spec(*c, spec);
    c->inputs = {{"a", a}, {"tau_min", tau_grid.front()}, {"tau_max", tau_grid.back()}};
    c->labels.emplace_back("side", side);
    c->notes.push_back("finite scan of f(tau)/tau; says nothing beyond the grid");
  }
  return rep;
}

struct RadiusPair {
  double R0 = 0.0;
  double R1 = 0.0;
  std::optional<bool> h3;  // mountain-pass geometry inside this shell, when known
};

struct PairOutcome {
  RadiusPair pair;
  Certificate first, second;
  bool pass = false;
  bool disjoint_from_previous = false;  // previous passing pair has R1 < this R0
  bool counted = false;
};

struct MultiplicityReport {
  std::vector<PairOutcome> pairs;
  int predicted_solutions = 0;
  std::string summary;
};

/// Runs check_h2 (or check_f2 when `a` is given) per pair and counts solutions
/// over the chain of passing, mutually disjoint shells.
inline MultiplicityReport multiplicity_scan(const NonlinearitySpec& spec, std::span<const RadiusPair> pairs,
                                            std::optional<double> a = {}, const CertifyOptions& opt = {}) {
  MultiplicityReport rep;
  std::optional<double> last_r1, prev_pass_r1;
  for (const auto& p : pairs) {
    PairOutcome o;
    o.pair = p;
    std::tie(o.first, o.second) = a ? check_f2(spec, *a, p.R0, p.R1, opt) : check_h2(spec, p.R0, p.R1, opt);
    o.pass = o.first.pass() && o.second.pass();
    if (o.pass) {
      o.disjoint_from_previous = prev_pass_r1.has_value() && *prev_pass_r1 < p.R0;
      if (!last_r1 || *last_r1 < p.R0) {
        o.counted = true;
        last_r1 = p.R1;
        rep.predicted_solutions += p.h3.value_or(false) ? 2 : 1;
      }
      prev_pass_r1 = p.R1;
    }
    rep.pairs.push_back(std::move(o));
  }
  rep.summary = std::to_string(rep.predicted_solutions) + " solutions predicted";
  return rep;
}

/// Conclusion drawn from a set of certificates for one existence result.
struct TheoremSummary {
  std::string name;
  bool applicable = false;  // all required certificates present
  bool verdict = false;
  bool conditional_on_h1 = false;
  bool heuristic = false;
  std::string conclusion;
};

inline std::vector<TheoremSummary> summarize(std::span<const Certificate> certs) {
  auto find = [&](Hypothesis h, std::optional<std::string_view> route = {}) -> const Certificate* {
    for (const auto& c : certs)
      if (c.hypothesis == h && c.label("route") == (route ? std::optional<std::string>(*route) : std::nullopt))
        return &c;
    return nullptr;
  };
  std::vector<TheoremSummary> out;
  auto with_h3 = [&](TheoremSummary& s) {
    const Certificate* h3 = find(Hypothesis::h3_geometry);
    if (s.verdict && h3 && h3->pass()) {
      s.heuristic = true;
      s.conclusion = "two positive solutions in the shell: a minimizer and a mountain-pass point (h3 heuristic)";
    } else if (s.verdict) {
      s.conclusion = "at least one positive solution in the shell";
    } else {
      s.conclusion = "not established";
    }
  };
  {
    TheoremSummary s;
    s.name = "shell_existence";
    const Certificate *h1 = find(Hypothesis::h1), *a = find(Hypothesis::h2a), *b = find(Hypothesis::h2b);
    s.applicable = h1 && a && b;
    s.verdict = s.applicable && h1->pass() && a->pass() && b->pass();
    s.conditional_on_h1 = true;
    with_h3(s);
    out.push_back(s);
  }
  {
    TheoremSummary s;
    s.name = "autonomous_growth";
    const Certificate *h1 = find(Hypothesis::h1), *a = find(Hypothesis::f2_lower), *b = find(Hypothesis::f2_upper);
    s.applicable = h1 && a && b;
    s.verdict = s.applicable && h1->pass() && a->pass() && b->pass();
    s.conditional_on_h1 = true;
    with_h3(s);
    out.push_back(s);
  }
  {
    TheoremSummary s;
    s.name = "compression_expansion";
    const Certificate *a = find(Hypothesis::r0_alpha), *b = find(Hypothesis::r0_beta);
    s.applicable = a && b;
    s.verdict = s.applicable && a->pass() && b->pass();
    s.conclusion = s.verdict ? "positive solution between the sup-norm levels (" + a->label("regime").value_or("") + ")"
                             : "not established";
    out.push_back(s);
  }
  {
    TheoremSummary s;
    s.name = "two_norm_shell";
    const Certificate* a = find(Hypothesis::H1a);
    if (!a) a = find(Hypothesis::H1a, "indicator");
    const Certificate* b = find(Hypothesis::H1b);
    s.applicable = a && b;
    s.verdict = s.applicable && a->pass() && b->pass();
    s.conclusion = s.verdict ? "positive solution minimizing energy in the two-norm shell; the energy gap condition "
                               "is not checked (inspect the mountain-pass estimate)"
                             : "not established";
    out.push_back(s);
  }
  for (auto& s : out)
    if (!s.applicable) s.conclusion = "not run";
  return out;
}

}  // namespace cantilever
