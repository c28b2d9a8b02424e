#pragma once

// Piecewise nonlinearities f(t,u) ≥ 0 given by u-ranges:
//
//   spec  := piece { ";" piece }
//   piece := "[" number "," ( number | "inf" ) ")" ":" expr
//
// Ranges are left-closed right-open, ascending, and cover [0,∞). Below u = 0
// f is continued by the constant f(t,0).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cantilever/errors.hpp"
#include "cantilever/expression.hpp"
#include "cantilever/kernel.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

struct Piece {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  Expr expr = Expr::number(0.0);
  Expr dfdu = Expr::number(0.0);
  std::optional<std::vector<PowerTerm>> primitive;  // closed-form antiderivative, when available
};

struct SpecOptions {
  double u_probe_max = 1000.0;  // upper end of the sampled positivity check
  int t_samples = 11;
  int u_samples = 401;
  double continuity_tolerance = 1e-9;
};

class NonlinearitySpec {
 public:
  NonlinearitySpec(std::vector<Piece> pieces, SpecOptions opts = {}) : pieces_(std::move(pieces)), opts_(opts) {
    validate();
  }

  std::span<const Piece> pieces() const noexcept { return pieces_; }
  bool autonomous() const noexcept { return autonomous_; }
  const SpecOptions& options() const noexcept { return opts_; }

  /// Interior breakpoints in u (the lo of every piece but the first).
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = 1; i < pieces_.size(); ++i) b.push_back(pieces_[i].lo);
    return b;
  }

  double f(double t, double u) const {
    detail::require_unit(t, "eval_f");
    if (!(u > 0.0)) u = 0.0;
    return piece_for(u).expr.eval(t, u);
  }

  /// Right-hand ∂f/∂u (0 below u = 0, where f is constant).
  double dfdu(double t, double u) const {
    detail::require_unit(t, "eval_dfdu");
    if (u < 0.0) return 0.0;
    return piece_for(u).dfdu.eval(t, u);
  }

  /// F(t,u) = ∫_0^u f(t,s) ds, closed form on power-type pieces.
  double F(double t, double u, const QuadratureConfig& cfg = {}) const {
    detail::require_unit(t, "eval_F");
    if (u <= 0.0) return pieces_.front().expr.eval(t, 0.0) * u;
    double acc = 0.0;
    for (const Piece& p : pieces_) {
      if (u <= p.lo) break;
      acc += piece_integral(p, t, p.lo, std::min(u, p.hi), cfg);
      if (u < p.hi) break;
    }
    return acc;
  }

  /// Canonical text; parse(text()) reproduces an identical spec.
  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (i) out += " ; ";
      const Piece& p = pieces_[i];
      out += '[' + Expr::format_number(p.lo) + ',' +
             (std::isinf(p.hi) ? std::string("inf") : Expr::format_number(p.hi)) + "): " + p.expr.str();
    }
    return out;
  }

  friend bool operator==(const NonlinearitySpec& a, const NonlinearitySpec& b) { return a.text() == b.text(); }

 private:
  const Piece& piece_for(double u) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), u, [](double x, const Piece& p) { return x < p.lo; });
    return *std::prev(it);
  }

  static double piece_integral(const Piece& p, double t, double a, double b, const QuadratureConfig& cfg) {
    if (b <= a) return 0.0;
    if (p.primitive) {
      double acc = 0.0;
      for (const auto& tm : *p.primitive) acc += power_term_primitive(tm, t, b) - power_term_primitive(tm, t, a);
      return acc;
    }
    QuadratureConfig local = cfg;
    local.panels = std::max(4, cfg.panels / 16);
    return integrate([&](double s) { return p.expr.eval(t, s); }, a, b, local).value;
  }

  void validate() {
    if (pieces_.empty()) throw SpecError("nonlinearity has no pieces");
    if (pieces_.front().lo != 0.0) throw SpecError("gap: first range must start at 0");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      Piece& p = pieces_[i];
      if (!(p.lo < p.hi)) throw SpecError("empty or reversed range [" + Expr::format_number(p.lo) + "," +
                                          Expr::format_number(p.hi) + ")");
      if (i + 1 < pieces_.size()) {
        const double next = pieces_[i + 1].lo;
        if (std::isinf(p.hi)) throw SpecError("overlap: a range ending at inf is followed by another range");
        if (next > p.hi) throw SpecError("gap between " + Expr::format_number(p.hi) + " and " + Expr::format_number(next));
        if (next < p.hi) throw SpecError("overlap at " + Expr::format_number(next));
      } else if (!std::isinf(p.hi)) {
        throw SpecError("gap: last range must end at inf");
      }
      p.dfdu = derivative_u(p.expr);
      p.primitive = decompose_power_terms(p.expr);
    }
    autonomous_ = std::none_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.expr.depends_on_t(); });

    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      const double b = pieces_[i].hi;
      for (double t : {0.0, 0.5, 1.0}) {
        const double left = pieces_[i].expr.eval(t, b);
        const double right = pieces_[i + 1].expr.eval(t, b);
        const double jump = std::abs(left - right);
        if (!(jump <= opts_.continuity_tolerance * std::max({1.0, std::abs(left), std::abs(right)}))) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "discontinuity at u = " << b << " (t = " << t << "): jump " << jump;
          throw SpecError(msg.str());
        }
      }
    }

    std::vector<double> us;
    for (int j = 0; j < opts_.u_samples; ++j) us.push_back(opts_.u_probe_max * j / (opts_.u_samples - 1));
    for (double b : breakpoints()) us.push_back(b);
    for (int i = 0; i < opts_.t_samples; ++i) {
      const double t = static_cast<double>(i) / (opts_.t_samples - 1);
      for (double u : us) {
        const double v = f(t, u);
        if (!std::isfinite(v) || v < 0.0) {
          std::ostringstream msg;
          msg.precision(17);
          msg << (std::isfinite(v) ? "negative" : "non-finite") << " value f(" << t << ", " << u << ") = " << v;
          throw SpecError(msg.str());
        }
      }
    }
  }

  std::vector<Piece> pieces_;
  SpecOptions opts_;
  bool autonomous_ = true;
};

/// Parse the piecewise DSL. Positions in ParseError refer to `text`.
inline NonlinearitySpec parse_spec(std::string_view text, SpecOptions opts = {}) {
  std::vector<Piece> pieces;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    std::string_view chunk = text.substr(start, end - start);
    detail::ExprParser p(chunk, start);
    p.skip_ws();
    if (p.peek() != '[') p.fail("expected '['", p.pos());
    // consume '[' by reparsing a suffix
    std::size_t pos = p.pos() + 1;
    detail::ExprParser lo_parser(chunk.substr(pos), start + pos);
    const double lo = lo_parser.parse_number();
    pos += lo_parser.pos();
    auto skip = [&] {
      while (pos < chunk.size() && std::isspace(static_cast<unsigned char>(chunk[pos]))) ++pos;
    };
    skip();
    if (pos >= chunk.size() || chunk[pos] != ',') throw ParseError("expected ','", start + pos);
    ++pos;
    skip();
    double hi;
    if (chunk.substr(pos, 3) == "inf") {
      hi = std::numeric_limits<double>::infinity();
      pos += 3;
    } else {
      detail::ExprParser hi_parser(chunk.substr(pos), start + pos);
      hi = hi_parser.parse_number();
      pos += hi_parser.pos();
    }
    skip();
    if (pos >= chunk.size() || chunk[pos] != ')') throw ParseError("expected ')'", start + pos);
    ++pos;
    skip();
    if (pos >= chunk.size() || chunk[pos] != ':') throw ParseError("expected ':'", start + pos);
    ++pos;
    Piece piece;
    piece.lo = lo;
    piece.hi = hi;
    piece.expr = parse_expression(chunk.substr(pos), start + pos);
    pieces.push_back(std::move(piece));
    if (end >= text.size()) break;
    start = end + 1;
  }
  return NonlinearitySpec(std::move(pieces), opts);
}

inline double eval_f(const NonlinearitySpec& spec, double t, double u) { return spec.f(t, u); }
inline double eval_F(const NonlinearitySpec& spec, double t, double u, const QuadratureConfig& cfg = {}) {
  return spec.F(t, u, cfg);
}

struct MonotoneWitness {
  char axis;  // 't' or 'u'
  double t1, u1, t2, u2, f1, f2;
};

/// Sampled check of "f nondecreasing in t and in u"; a PASS is evidence, not proof.
struct MonotoneVerdict {
  bool pass = true;
  std::optional<MonotoneWitness> witness;
  int samples = 0;
  double u_max = 0.0;
  double worst_drop = 0.0;  // largest decrease along an axis, relative to max(1,|f|)
};

inline MonotoneVerdict check_monotone(const NonlinearitySpec& spec, int samples, std::optional<double> u_max = {}) {
  if (samples < 2) throw PreconditionError("check_monotone: samples must be >= 2");
  const double umax = u_max.value_or(spec.options().u_probe_max);
  std::vector<double> us;
  for (int j = 0; j < samples; ++j) us.push_back(umax * j / (samples - 1));
  for (double b : spec.breakpoints())
    if (b < umax) us.push_back(b);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) ts.push_back(static_cast<double>(i) / (samples - 1));

  MonotoneVerdict v{true, std::nullopt, samples, umax};
  auto scale = [](double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); };
  auto visit = [&](char axis, double t1, double u1, double t2, double u2, double here, double next) {
    const double drop = (here - next) / scale(here, next);
    v.worst_drop = std::max(v.worst_drop, drop);
    if (drop > 1e-12 && v.pass) {
      v.pass = false;
      v.witness = MonotoneWitness{axis, t1, u1, t2, u2, here, next};
    }
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < us.size(); ++j) {
      const double here = spec.f(ts[i], us[j]);
      if (j + 1 < us.size()) visit('u', ts[i], us[j], ts[i], us[j + 1], here, spec.f(ts[i], us[j + 1]));
      if (i + 1 < ts.size()) visit('t', ts[i], us[j], ts[i + 1], us[j], here, spec.f(ts[i + 1], us[j]));
    }
  }
  return v;
}

/// t ↦ min / max of f(t,·) over [minorant(t)·radius, upper_u].
struct Envelope {
  std::function<double(double)> lower;
  std::function<double(double)> upper;
  std::vector<double> kinks;  // t-abscissae where the interval end crosses a breakpoint
};

namespace detail {

template <class G>
double golden_extremum(G&& g, double a, double b, bool maximize) {
  constexpr double inv_phi = 0.6180339887498949;
  auto val = [&](double x) { return maximize ? -g(x) : g(x); };
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = val(c), fd = val(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = val(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = val(d);
    }
  }
  return maximize ? -std::min(fc, fd) : std::min(fc, fd);
}

inline double extremum_over(const NonlinearitySpec& spec, double t, double lo, double hi, bool maximize) {
  std::vector<double> cuts{lo};
  for (double b : spec.breakpoints())
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  double best = spec.f(t, lo);
  auto better = [&](double x) { best = maximize ? std::max(best, x) : std::min(best, x); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    better(spec.f(t, cuts[i + 1]));
    if (cuts[i + 1] > cuts[i])
      better(golden_extremum([&](double u) { return spec.f(t, u); }, cuts[i], cuts[i + 1], maximize));
  }
  return best;
}

}  // namespace detail

/// Envelope of f over [minorant(kind,t)·radius, upper_u]. With `monotone`
/// unset, check_monotone decides whether the closed-form endpoint values apply.
inline Envelope envelope(const NonlinearitySpec& spec, double radius, Minorant kind, double upper_u,
                         std::optional<bool> monotone = {}) {
  if (!(radius > 0.0)) throw PreconditionError("envelope: radius must be positive");
  double max_lower = 0.0;
  for (int i = 0; i <= 1000; ++i) max_lower = std::max(max_lower, minorant(kind, i / 1000.0) * radius);
  max_lower = std::max(max_lower, minorant(kind, 0.75) * radius);
  if (upper_u < max_lower * (1.0 - 1e-15))
    throw PreconditionError("envelope: empty interval, upper_u below minorant(t)*radius for some t");
  const bool mono = monotone.value_or(check_monotone(spec, 65, std::max(upper_u, 1.0)).pass);
  Envelope env;
  const auto levels = spec.breakpoints();
  env.kinks = minorant_crossings(kind, radius, levels);
  if (mono) {
    env.lower = [&spec, kind, radius](double t) { return spec.f(t, minorant(kind, t) * radius); };
    env.upper = [&spec, upper_u](double t) { return spec.f(t, upper_u); };
  } else {
    env.lower = [&spec, kind, radius, upper_u](double t) {
      return detail::extremum_over(spec, t, std::min(minorant(kind, t) * radius, upper_u), upper_u, false);
    };
    env.upper = [&spec, kind, radius, upper_u](double t) {
      return detail::extremum_over(spec, t, std::min(minorant(kind, t) * radius, upper_u), upper_u, true);
    };
  }
  return env;
}

}  // namespace cantilever
