#pragma once

// Arithmetic expressions in t and u over + − * ^ with real constants:
//
//   expr   := term { ("+"|"-") term }
//   term   := factor { "*" factor }
//   factor := number | "u" | "t" | "(" expr ")" | factor "^" number
//
// Exponents may carry a leading minus sign.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cantilever/errors.hpp"

namespace cantilever {

class Expr {
 public:
  enum class Kind { Number, U, T, Add, Sub, Mul, Pow };

  static Expr number(double v) { return Expr(std::make_shared<Node>(Node{Kind::Number, v, {}, {}})); }
  static Expr var_u() { return Expr(std::make_shared<Node>(Node{Kind::U, 0.0, {}, {}})); }
  static Expr var_t() { return Expr(std::make_shared<Node>(Node{Kind::T, 0.0, {}, {}})); }
  static Expr binary(Kind k, Expr l, Expr r) {
    return Expr(std::make_shared<Node>(Node{k, 0.0, std::move(l.node_), std::move(r.node_)}));
  }
  /// base ^ exponent with a constant exponent.
  static Expr power(Expr base, double exponent) {
    return Expr(std::make_shared<Node>(Node{Kind::Pow, exponent, std::move(base.node_), {}}));
  }

  Kind kind() const noexcept { return node_->kind; }
  double value() const noexcept { return node_->value; }  // number, or exponent for Pow
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  double eval(double t, double u) const { return eval_node(*node_, t, u); }

  bool depends_on_u() const { return depends(*node_, Kind::U); }
  bool depends_on_t() const { return depends(*node_, Kind::T); }

  /// Minimal-parenthesis rendering; numbers in shortest round-trip form.
  std::string str() const {
    std::string out;
    print(*node_, out, 0);
    return out;
  }

  friend bool operator==(const Expr& a, const Expr& b) { return a.str() == b.str(); }

 private:
  struct Node {
    Kind kind;
    double value;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static double eval_node(const Node& n, double t, double u) {
    switch (n.kind) {
      case Kind::Number: return n.value;
      case Kind::U: return u;
      case Kind::T: return t;
      case Kind::Add: return eval_node(*n.lhs, t, u) + eval_node(*n.rhs, t, u);
      case Kind::Sub: return eval_node(*n.lhs, t, u) - eval_node(*n.rhs, t, u);
      case Kind::Mul: return eval_node(*n.lhs, t, u) * eval_node(*n.rhs, t, u);
      case Kind::Pow: {
        const double b = eval_node(*n.lhs, t, u);
        if (b == 0.0 && n.value > 0.0) return 0.0;
        return std::pow(b, n.value);
      }
    }
    return 0.0;
  }

  static bool depends(const Node& n, Kind var) {
    switch (n.kind) {
      case Kind::Number: return false;
      case Kind::U:
      case Kind::T: return n.kind == var;
      case Kind::Pow: return depends(*n.lhs, var);
      default: return depends(*n.lhs, var) || depends(*n.rhs, var);
    }
  }

  static int precedence(Kind k) {
    switch (k) {
      case Kind::Add:
      case Kind::Sub: return 1;
      case Kind::Mul: return 2;
      case Kind::Pow: return 3;
      default: return 4;
    }
  }

  static void print(const Node& n, std::string& out, int context) {
    const int p = precedence(n.kind);
    const bool parens = p < context;
    if (parens) out += '(';
    switch (n.kind) {
      case Kind::Number: out += format_number(n.value); break;
      case Kind::U: out += 'u'; break;
      case Kind::T: out += 't'; break;
      case Kind::Add:
        print(*n.lhs, out, 1);
        out += " + ";
        print(*n.rhs, out, 2);  // right operand of a left-assoc op needs tighter binding
        break;
      case Kind::Sub:
        print(*n.lhs, out, 1);
        out += " - ";
        print(*n.rhs, out, 2);
        break;
      case Kind::Mul:
        print(*n.lhs, out, 2);
        out += '*';
        print(*n.rhs, out, 3);
        break;
      case Kind::Pow:
        print(*n.lhs, out, 3);
        out += '^';
        out += format_number(n.value);
        break;
    }
    if (parens) out += ')';
  }

 public:
  static std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }

 private:
  std::shared_ptr<const Node> node_;
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        const char op = text_[pos_++];
        Expr r = parse_term();
        e = Expr::binary(op == '+' ? Expr::Kind::Add : Expr::Kind::Sub, std::move(e), std::move(r));
      } else {
        return e;
      }
    }
  }

  std::size_t pos() const noexcept { return pos_; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  /// Unsigned decimal literal (optionally signed when `allow_sign`).
  double parse_number(bool allow_sign = false) {
    skip_ws();
    const std::size_t start = pos_;
    if (allow_sign && (peek() == '-' || peek() == '+')) ++pos_;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
    }
    if (!digits) fail("expected number", start);
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_++;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
      } else {
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    std::string_view lit = text_.substr(start, pos_ - start);
    if (!lit.empty() && lit.front() == '+') lit.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (ec != std::errc() || ptr != lit.data() + lit.size()) fail("malformed number", start);
    return v;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, offset_ + at); }

 private:
  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        Expr r = parse_factor();
        e = Expr::binary(Expr::Kind::Mul, std::move(e), std::move(r));
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    skip_ws();
    Expr e = parse_primary();
    for (;;) {
      skip_ws();
      if (peek() != '^') return e;
      ++pos_;
      e = Expr::power(std::move(e), parse_number(true));
    }
  }

  Expr parse_primary() {
    const char c = peek();
    if (c == 'u') {
      ++pos_;
      return Expr::var_u();
    }
    if (c == 't') {
      ++pos_;
      return Expr::var_t();
    }
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      skip_ws();
      if (peek() != ')') fail("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::number(parse_number());
    if (c == '\0') fail("unexpected end of expression", pos_);
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse a complete expression; `offset` shifts reported error positions.
inline Expr parse_expression(std::string_view text, std::size_t offset = 0) {
  detail::ExprParser p(text, offset);
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos() != text.size()) p.fail("trailing input", p.pos());
  return e;
}

namespace detail {

inline bool is_number(const Expr& e, double v) { return e.kind() == Expr::Kind::Number && e.value() == v; }

inline Expr add(Expr a, Expr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number) return Expr::number(a.value() + b.value());
  return Expr::binary(Expr::Kind::Add, std::move(a), std::move(b));
}
inline Expr sub(Expr a, Expr b) {
  if (is_number(b, 0.0)) return a;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number) return Expr::number(a.value() - b.value());
  return Expr::binary(Expr::Kind::Sub, std::move(a), std::move(b));
}
inline Expr mul(Expr a, Expr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return Expr::number(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number) return Expr::number(a.value() * b.value());
  return Expr::binary(Expr::Kind::Mul, std::move(a), std::move(b));
}

}  // namespace detail

/// Symbolic ∂/∂u.
inline Expr derivative_u(const Expr& e) {
  using K = Expr::Kind;
  using namespace detail;
  switch (e.kind()) {
    case K::Number:
    case K::T: return Expr::number(0.0);
    case K::U: return Expr::number(1.0);
    case K::Add: return add(derivative_u(e.lhs()), derivative_u(e.rhs()));
    case K::Sub: return sub(derivative_u(e.lhs()), derivative_u(e.rhs()));
    case K::Mul: return add(mul(derivative_u(e.lhs()), e.rhs()), mul(e.lhs(), derivative_u(e.rhs())));
    case K::Pow: {
      const double p = e.value();
      Expr db = derivative_u(e.lhs());
      if (is_number(db, 0.0)) return Expr::number(0.0);
      Expr outer = p == 1.0 ? Expr::number(1.0) : mul(Expr::number(p), Expr::power(e.lhs(), p - 1.0));
      return mul(outer, db);
    }
  }
  return Expr::number(0.0);
}

/// One summand coeff · (slope·u + shift)^power with u-free coeff, slope, shift.
struct PowerTerm {
  Expr coeff;
  Expr slope;
  Expr shift;
  double power;
};

namespace detail {

inline std::vector<PowerTerm> constant_terms(Expr e) {
  return {PowerTerm{std::move(e), Expr::number(0.0), Expr::number(1.0), 0.0}};
}

/// Linear form (slope, shift) if every term is of degree 0 or 1 in a linear base.
inline std::optional<std::pair<Expr, Expr>> as_linear(const std::vector<PowerTerm>& terms) {
  Expr slope = Expr::number(0.0), shift = Expr::number(0.0);
  for (const auto& tm : terms) {
    if (tm.power == 0.0) {
      shift = add(shift, tm.coeff);
    } else if (tm.power == 1.0) {
      slope = add(slope, mul(tm.coeff, tm.slope));
      shift = add(shift, mul(tm.coeff, tm.shift));
    } else {
      return std::nullopt;
    }
  }
  return std::pair{slope, shift};
}

}  // namespace detail

/// Rewrite e as a sum of PowerTerms, or nullopt when the expression falls
/// outside that class (e.g. a product of two different u-dependent bases).
inline std::optional<std::vector<PowerTerm>> decompose_power_terms(const Expr& e) {
  using K = Expr::Kind;
  using namespace detail;
  if (!e.depends_on_u()) return constant_terms(e);
  switch (e.kind()) {
    case K::U: return std::vector<PowerTerm>{{Expr::number(1.0), Expr::number(1.0), Expr::number(0.0), 1.0}};
    case K::Add:
    case K::Sub: {
      auto l = decompose_power_terms(e.lhs());
      auto r = decompose_power_terms(e.rhs());
      if (!l || !r) return std::nullopt;
      for (auto& tm : *r) {
        if (e.kind() == K::Sub) tm.coeff = mul(Expr::number(-1.0), tm.coeff);
        l->push_back(std::move(tm));
      }
      return l;
    }
    case K::Mul: {
      auto l = decompose_power_terms(e.lhs());
      auto r = decompose_power_terms(e.rhs());
      if (!l || !r) return std::nullopt;
      std::vector<PowerTerm> out;
      for (const auto& a : *l) {
        for (const auto& b : *r) {
          Expr c = mul(a.coeff, b.coeff);
          if (a.power == 0.0) {
            out.push_back({c, b.slope, b.shift, b.power});
          } else if (b.power == 0.0) {
            out.push_back({c, a.slope, a.shift, a.power});
          } else if (a.slope == b.slope && a.shift == b.shift) {
            out.push_back({c, a.slope, a.shift, a.power + b.power});
          } else {
            return std::nullopt;
          }
        }
      }
      return out;
    }
    case K::Pow: {
      auto base = decompose_power_terms(e.lhs());
      if (!base) return std::nullopt;
      const double q = e.value();
      if (base->size() == 1 && (*base)[0].power != 0.0) {
        const auto& b = (*base)[0];
        return std::vector<PowerTerm>{{Expr::power(b.coeff, q), b.slope, b.shift, b.power * q}};
      }
      if (auto lin = as_linear(*base)) {
        return std::vector<PowerTerm>{{Expr::number(1.0), lin->first, lin->second, q}};
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

/// ∫ coeff·(a u + c)^p du as a function of u (any fixed antiderivative).
inline double power_term_primitive(const PowerTerm& tm, double t, double u) {
  const double k = tm.coeff.eval(t, u);
  const double a = tm.slope.eval(t, u);
  const double c = tm.shift.eval(t, u);
  const double p = tm.power;
  if (a == 0.0 || p == 0.0) {
    const double base = p == 0.0 ? 1.0 : std::pow(c, p);
    return k * base * u;
  }
  const double x = a * u + c;
  if (p == -1.0) return k * std::log(std::abs(x)) / a;
  if (x == 0.0 && p + 1.0 > 0.0) return 0.0;
  return k * std::pow(x, p + 1.0) / (a * (p + 1.0));
}

}  // namespace cantilever
