#pragma once

// Command-line front end. `run` takes the arguments after the program name and
// writes to the given streams, so tests can drive it in-process.
//
// Exit codes: 0 success, 1 mathematical failure (FAIL certificate,
// non-convergence), 2 usage or configuration error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cantilever/certify.hpp"
#include "cantilever/eigenpair.hpp"
#include "cantilever/examples.hpp"
#include "cantilever/solver.hpp"
#include "cantilever/variational.hpp"

namespace cantilever::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string nonlinearity;
  int panels = 256;
  QuadratureConfig quadrature{};

  SolveMethod method = SolveMethod::Newton;
  double solve_tol = 1e-10;
  int max_iterations = 500;
  double start_level = 1.0;  // start = level·J1; 0 starts from zero

  std::optional<std::pair<double, double>> h2;
  struct F2 {
    double a, R0, R1;
  };
  std::optional<F2> f2;
  std::optional<std::pair<double, double>> r0;
  struct TwoNorm {
    double R0, R1;
    std::optional<double> a;
  };
  std::optional<TwoNorm> H1;
  std::optional<double> h3_r;

  std::optional<ShellSpec> shell;
  double u0_norm = 1.0;
  std::optional<double> u1_sup, u1_norm;
  double var_tol = 1e-6;
  int path_points = 32;
  int starts = 8;
  std::uint64_t seed = 0;

  std::optional<double> scan_a;
  std::vector<double> taus;
  std::vector<RadiusPair> pairs;

  // power-family reproduction
  double p = 0.5;
  int b_min = 3;
  int b_max = 400;
  double sphere_r = 2.0;
};

// ---------------------------------------------------------------- config

namespace detail {

inline void allow(const json& obj, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": '" + key + "' has the wrong type");
  }
}

template <class T>
void get_if(const json& obj, const char* key, const std::string& where, T& target) {
  if (obj.contains(key)) target = get<T>(obj, key, where);
}

inline SolveMethod parse_method(const std::string& s) {
  if (s == "picard") return SolveMethod::Picard;
  if (s == "monotone-up") return SolveMethod::MonotoneUp;
  if (s == "monotone-down") return SolveMethod::MonotoneDown;
  if (s == "newton") return SolveMethod::Newton;
  throw ConfigError("solve.method: expected picard, monotone-up, monotone-down or newton, got '" + s + "'");
}

inline std::vector<double> tau_grid(const json& t) {
  if (t.is_array()) return t.get<std::vector<double>>();
  allow(t, {"from", "to", "per_decade"}, "scan.tau");
  const double from = get<double>(t, "from", "scan.tau"), to = get<double>(t, "to", "scan.tau");
  const int per = t.contains("per_decade") ? get<int>(t, "per_decade", "scan.tau") : 1;
  if (!(from > 0.0 && to > from && per > 0)) throw ConfigError("scan.tau: need 0 < from < to and per_decade > 0");
  const int n = static_cast<int>(std::lround(std::log10(to / from) * per));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(from * std::pow(10.0, static_cast<double>(i) / per));
  return out;
}

}  // namespace detail

inline Config parse_config(const json& j) {
  using detail::get;
  using detail::get_if;
  detail::allow(j, {"nonlinearity", "panels", "quadrature", "solve", "certify", "shell", "endpoints", "variational",
                    "scan", "power_family"},
                "config");
  Config c;
  get_if(j, "nonlinearity", "config", c.nonlinearity);
  get_if(j, "panels", "config", c.panels);
  c.quadrature.panels = c.panels;
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    detail::allow(q, {"panels", "points", "tolerance"}, "quadrature");
    get_if(q, "panels", "quadrature", c.quadrature.panels);
    get_if(q, "points", "quadrature", c.quadrature.points_per_panel);
    get_if(q, "tolerance", "quadrature", c.quadrature.refinement_tolerance);
  }
  if (j.contains("solve")) {
    const auto& s = j["solve"];
    detail::allow(s, {"method", "tol", "max_iterations", "start_level"}, "solve");
    if (s.contains("method")) c.method = detail::parse_method(get<std::string>(s, "method", "solve"));
    get_if(s, "tol", "solve", c.solve_tol);
    get_if(s, "max_iterations", "solve", c.max_iterations);
    get_if(s, "start_level", "solve", c.start_level);
  }
  if (j.contains("certify")) {
    const auto& s = j["certify"];
    detail::allow(s, {"h2", "f2", "r0", "H1", "h3"}, "certify");
    if (s.contains("h2")) {
      const auto& h = s["h2"];
      detail::allow(h, {"R0", "R1"}, "certify.h2");
      c.h2 = {get<double>(h, "R0", "certify.h2"), get<double>(h, "R1", "certify.h2")};
    }
    if (s.contains("f2")) {
      const auto& h = s["f2"];
      detail::allow(h, {"a", "R0", "R1"}, "certify.f2");
      c.f2 = Config::F2{get<double>(h, "a", "certify.f2"), get<double>(h, "R0", "certify.f2"),
                        get<double>(h, "R1", "certify.f2")};
    }
    if (s.contains("r0")) {
      const auto& h = s["r0"];
      detail::allow(h, {"alphaK", "betaK"}, "certify.r0");
      c.r0 = {get<double>(h, "alphaK", "certify.r0"), get<double>(h, "betaK", "certify.r0")};
    }
    if (s.contains("H1")) {
      const auto& h = s["H1"];
      detail::allow(h, {"R0", "R1", "a"}, "certify.H1");
      c.H1 = Config::TwoNorm{get<double>(h, "R0", "certify.H1"), get<double>(h, "R1", "certify.H1"), std::nullopt};
      if (h.contains("a")) c.H1->a = get<double>(h, "a", "certify.H1");
    }
    if (s.contains("h3")) {
      const auto& h = s["h3"];
      detail::allow(h, {"r"}, "certify.h3");
      c.h3_r = get<double>(h, "r", "certify.h3");
    }
  }
  if (j.contains("shell")) {
    const auto& s = j["shell"];
    detail::allow(s, {"variant", "R0", "R1"}, "shell");
    ShellSpec sh;
    const auto v = s.contains("variant") ? get<std::string>(s, "variant", "shell") : std::string("energetic");
    if (v == "energetic") sh.variant = ShellVariant::Energetic;
    else if (v == "two_norm") sh.variant = ShellVariant::TwoNorm;
    else throw ConfigError("shell.variant: expected energetic or two_norm, got '" + v + "'");
    sh.R0 = get<double>(s, "R0", "shell");
    sh.R1 = get<double>(s, "R1", "shell");
    c.shell = sh;
  }
  if (j.contains("endpoints")) {
    const auto& s = j["endpoints"];
    detail::allow(s, {"u0_norm", "u1_sup", "u1_norm"}, "endpoints");
    get_if(s, "u0_norm", "endpoints", c.u0_norm);
    if (s.contains("u1_sup")) c.u1_sup = get<double>(s, "u1_sup", "endpoints");
    if (s.contains("u1_norm")) c.u1_norm = get<double>(s, "u1_norm", "endpoints");
  }
  if (j.contains("variational")) {
    const auto& s = j["variational"];
    detail::allow(s, {"tol", "path_points", "starts", "seed"}, "variational");
    get_if(s, "tol", "variational", c.var_tol);
    get_if(s, "path_points", "variational", c.path_points);
    get_if(s, "starts", "variational", c.starts);
    get_if(s, "seed", "variational", c.seed);
  }
  if (j.contains("scan")) {
    const auto& s = j["scan"];
    detail::allow(s, {"a", "tau", "pairs"}, "scan");
    if (s.contains("a")) c.scan_a = get<double>(s, "a", "scan");
    if (s.contains("tau")) c.taus = detail::tau_grid(s["tau"]);
    if (s.contains("pairs")) {
      if (!s["pairs"].is_array()) throw ConfigError("scan.pairs: expected an array");
      for (const auto& p : s["pairs"]) {
        detail::allow(p, {"R0", "R1", "h3"}, "scan.pairs[]");
        RadiusPair rp{get<double>(p, "R0", "scan.pairs[]"), get<double>(p, "R1", "scan.pairs[]"), std::nullopt};
        if (p.contains("h3")) rp.h3 = get<bool>(p, "h3", "scan.pairs[]");
        c.pairs.push_back(rp);
      }
    }
  }
  if (j.contains("power_family")) {
    const auto& s = j["power_family"];
    detail::allow(s, {"p", "b_min", "b_max", "r"}, "power_family");
    get_if(s, "p", "power_family", c.p);
    get_if(s, "b_min", "power_family", c.b_min);
    get_if(s, "b_max", "power_family", c.b_max);
    get_if(s, "r", "power_family", c.sphere_r);
  }
  return c;
}

inline void validate(const Config& c) {
  const bool pow2 = c.panels > 0 && (c.panels & (c.panels - 1)) == 0;
  if (!pow2 || c.panels < 32 || c.panels > 4096) throw ConfigError("panels must be a power of two in [32, 4096]");
  if (c.quadrature.panels < 1 || c.quadrature.points_per_panel < 2 || c.quadrature.points_per_panel > ::cantilever::detail::kMaxGaussPoints)
    throw ConfigError("quadrature: need panels >= 1 and 2 <= points <= 64");
  if (!(c.quadrature.refinement_tolerance > 0.0)) throw ConfigError("quadrature.tolerance must be > 0");
  if (!(c.solve_tol > 0.0) || !(c.var_tol > 0.0)) throw ConfigError("tolerances must be > 0");
  if (c.max_iterations < 1) throw ConfigError("solve.max_iterations must be >= 1");
  if (!(c.start_level >= 0.0)) throw ConfigError("solve.start_level must be >= 0");
  if (c.h2 && !(c.h2->first > 0.0 && c.h2->first < c.h2->second)) throw ConfigError("certify.h2: need 0 < R0 < R1");
  if (c.f2 && !(c.f2->a > 0.0 && c.f2->a < 1.0 && c.f2->R0 > 0.0 && c.f2->R0 < c.f2->R1))
    throw ConfigError("certify.f2: need 0 < a < 1 and 0 < R0 < R1");
  if (c.r0 && !(c.r0->first > 0.0 && c.r0->second > 0.0 && c.r0->first != c.r0->second))
    throw ConfigError("certify.r0: need positive, distinct alphaK and betaK");
  if (c.H1 && c.H1->a && !(*c.H1->a > 0.0 && *c.H1->a < 1.0)) throw ConfigError("certify.H1.a must lie in (0,1)");
  if (c.shell) {
    try {
      c.shell->validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  }
  if (!(c.u0_norm > 0.0)) throw ConfigError("endpoints.u0_norm must be > 0");
  if (c.u1_sup && c.u1_norm) throw ConfigError("endpoints: give u1_sup or u1_norm, not both");
  if (c.path_points < 8) throw ConfigError("variational.path_points must be >= 8");
  if (c.starts < 1) throw ConfigError("variational.starts must be >= 1");
  if (c.b_min < 1 || c.b_max < c.b_min) throw ConfigError("power_family: need 1 <= b_min <= b_max");
  if (!(c.sphere_r > 0.0)) throw ConfigError("power_family.r must be > 0");
}

inline json config_json(const Config& c) {
  json j;
  j["nonlinearity"] = c.nonlinearity;
  j["panels"] = c.panels;
  j["quadrature"] = {{"panels", c.quadrature.panels},
                     {"points", c.quadrature.points_per_panel},
                     {"tolerance", c.quadrature.refinement_tolerance}};
  j["solve"] = {{"method", to_string(c.method)},
                {"tol", c.solve_tol},
                {"max_iterations", c.max_iterations},
                {"start_level", c.start_level}};
  json cert = json::object();
  if (c.h2) cert["h2"] = {{"R0", c.h2->first}, {"R1", c.h2->second}};
  if (c.f2) cert["f2"] = {{"a", c.f2->a}, {"R0", c.f2->R0}, {"R1", c.f2->R1}};
  if (c.r0) cert["r0"] = {{"alphaK", c.r0->first}, {"betaK", c.r0->second}};
  if (c.H1) {
    cert["H1"] = {{"R0", c.H1->R0}, {"R1", c.H1->R1}};
    if (c.H1->a) cert["H1"]["a"] = *c.H1->a;
  }
  if (c.h3_r) cert["h3"] = {{"r", *c.h3_r}};
  j["certify"] = cert;
  if (c.shell) j["shell"] = {{"variant", to_string(c.shell->variant)}, {"R0", c.shell->R0}, {"R1", c.shell->R1}};
  json ep = {{"u0_norm", c.u0_norm}};
  if (c.u1_sup) ep["u1_sup"] = *c.u1_sup;
  if (c.u1_norm) ep["u1_norm"] = *c.u1_norm;
  j["endpoints"] = ep;
  j["variational"] = {{"tol", c.var_tol}, {"path_points", c.path_points}, {"starts", c.starts}, {"seed", c.seed}};
  return j;
}

/// Built-in configurations for `--example`.
inline Config example_config(const std::string& name) {
  Config c;
  if (name == "cantilever-load") {
    c.nonlinearity = kCantileverLoadText;
    c.h2 = {{1.0, 37.0}};
    c.method = SolveMethod::MonotoneDown;
    c.start_level = 138.0;
    c.max_iterations = 5000;
    c.scan_a = 2.0 / 3.0;
    c.taus = detail::tau_grid(json{{"from", 1e-6}, {"to", 1e6}, {"per_decade", 2}});
    return c;
  }
  if (name == "power-family") {
    c.nonlinearity = power_family_text(c.p, 51.0);
    c.shell = ShellSpec{ShellVariant::Energetic, 1e-7, 2000.0};
    c.u1_sup = 51.0;
    c.h3_r = 2.0;
    c.f2 = Config::F2{0.75, 1e-9, 1.0};
    c.scan_a = 0.75;
    c.taus = detail::tau_grid(json{{"from", 1e-12}, {"to", 1e8}, {"per_decade", 1}});
    c.method = SolveMethod::Newton;
    return c;
  }
  throw ConfigError("unknown example '" + name + "' (expected cantilever-load or power-family)");
}

// ---------------------------------------------------------------- JSON

inline json to_json(const Certificate& c) {
  json echo = json::object();
  for (const auto& [k, v] : c.inputs) echo[k] = v;
  for (const auto& [k, v] : c.labels) echo[k] = v;
  return {{"hypothesis", to_string(c.hypothesis)},
          {"lhs", c.lhs},
          {"rhs", c.rhs},
          {"margin", c.margin},
          {"verdict", to_string(c.verdict)},
          {"heuristic", c.heuristic},
          {"quadrature_error_estimate", c.quadrature_error_estimate},
          {"inputs_echo", echo},
          {"notes", c.notes}};
}

inline json to_json(const TheoremSummary& s) {
  json j = {{"name", s.name}, {"applicable", s.applicable}};
  j["verdict"] = s.applicable ? json(s.verdict ? "PASS" : "FAIL") : json(nullptr);
  j["conditional_on_h1"] = s.conditional_on_h1;
  j["heuristic"] = s.heuristic;
  j["conclusion"] = s.conclusion;
  return j;
}

inline json to_json(const SolveReport& r) {
  return {{"method", to_string(r.method)},
          {"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"residual_sup", r.residual_sup},
          {"residual_L2", r.residual_L2},
          {"norm_energetic", r.norm_energetic},
          {"norm_L2", r.norm_L2},
          {"norm_sup", r.norm_sup},
          {"u_at_1", r.solution.values.back()},
          {"cone_M0_ok", r.cone_M0_ok},
          {"cone_M_ok", r.cone_M_ok},
          {"convex_ok", r.convex_ok},
          {"lipschitz_estimate", r.lipschitz_estimate},
          {"contraction_warning", r.contraction_warning},
          {"message", r.message},
          {"trace", r.trace},
          {"sup_trace", r.sup_trace}};
}

inline json to_json(const CriticalPointReport& r) {
  json j = {{"kind", to_string(r.kind)},
            {"energy", r.energy},
            {"estimate_m_or_c", r.estimate_m_or_c},
            {"projected_gradient_norm", r.projected_gradient_norm},
            {"converged", r.converged},
            {"polished", r.polished},
            {"iterations", r.iterations},
            {"inner_active", r.inner_active},
            {"outer_active", r.outer_active},
            {"norms",
             {{"energetic", r.point_norms.energetic},
              {"L2_of_u", r.point_norms.L2_of_u},
              {"sup_of_u", r.point_norms.sup_of_u}}},
            {"message", r.message}};
  if (r.kind == CriticalKind::MountainPass) {
    j["interior_pass"] = r.interior_pass;
    j["path_energies"] = r.path_energies;
  }
  return j;
}

// ---------------------------------------------------------------- CSV

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) out += (k ? "," : "") + num(columns[k][i]);
    out += '\n';
  }
  return out;
}

inline std::string certificates_csv(const std::vector<Certificate>& certs) {
  std::string out = "hypothesis,lhs,rhs,margin,verdict,heuristic,quadrature_error_estimate\n";
  for (const auto& c : certs)
    out += std::string(to_string(c.hypothesis)) + "," + num(c.lhs) + "," + num(c.rhs) + "," + num(c.margin) + "," +
           std::string(to_string(c.verdict)) + "," + (c.heuristic ? "true" : "false") + "," +
           num(c.quadrature_error_estimate) + "\n";
  return out;
}

inline std::string point_csv(const CurvatureRepr& w) {
  const auto u = u_from_curvature(w);
  return csv({"t", "w", "u"}, {std::vector<double>(w.grid.nodes().begin(), w.grid.nodes().end()), w.w, u.values});
}

// ---------------------------------------------------------------- commands

struct Output {
  json report;
  std::string csv;
  int code = 0;
};

namespace detail {

inline NonlinearitySpec spec_of(const Config& c) {
  if (c.nonlinearity.empty()) throw ConfigError("no nonlinearity given (use --config or --example)");
  return parse_spec(c.nonlinearity);
}

inline std::pair<CurvatureRepr, std::optional<CurvatureRepr>> endpoints(const Config& c, const Grid& g) {
  const auto phi = normalized_phi_curvature(g);
  std::optional<CurvatureRepr> w1;
  if (c.u1_sup) w1 = (*c.u1_sup / norms(phi).sup_of_u) * phi;
  if (c.u1_norm) w1 = *c.u1_norm * phi;
  return {c.u0_norm * phi, w1};
}

inline const ShellSpec& need_shell(const Config& c) {
  if (!c.shell) throw ConfigError("this command needs a 'shell' section");
  return *c.shell;
}

inline DescentOptions descent_options() { return DescentOptions{}; }

}  // namespace detail

inline Output cmd_certify(const Config& c) {
  const auto spec = detail::spec_of(c);
  CertifyOptions opt;
  opt.quadrature = c.quadrature;
  std::vector<Certificate> certs{check_h1(spec, opt)};
  std::vector<std::string> skipped;
  const bool h1 = certs.front().pass();
  if (c.h2) {
    if (!h1) {
      skipped.push_back("h2: f failed the sampled monotonicity check");
    } else {
      auto [a, b] = check_h2(spec, c.h2->first, c.h2->second, opt);
      certs.push_back(a);
      certs.push_back(b);
    }
  }
  if (c.f2) {
    if (!spec.autonomous()) throw ConfigError("certify.f2 needs a nonlinearity without t");
    if (!h1) {
      skipped.push_back("f2: f failed the sampled monotonicity check");
    } else {
      auto [a, b] = check_f2(spec, c.f2->a, c.f2->R0, c.f2->R1, opt);
      certs.push_back(a);
      certs.push_back(b);
    }
  }
  if (c.r0) {
    auto [a, b] = check_r0(spec, c.r0->first, c.r0->second, opt);
    certs.push_back(a);
    certs.push_back(b);
  }
  if (c.H1) {
    auto [a, b] = check_H1(spec, c.H1->R0, c.H1->R1, opt);
    certs.push_back(a);
    certs.push_back(b);
    if (c.H1->a) {
      if (!spec.autonomous()) throw ConfigError("certify.H1.a needs a nonlinearity without t");
      certs.push_back(check_H1_indicator(spec, c.H1->R0, *c.H1->a, opt));
    }
  }
  if (c.h3_r) {
    const Grid g(c.panels);
    auto [w0, w1] = detail::endpoints(c, g);
    if (!w1) throw ConfigError("certify.h3 needs endpoints.u1_sup or endpoints.u1_norm");
    certs.push_back(check_h3(spec, detail::need_shell(c), w0, *w1, *c.h3_r,
                             H3Options{c.starts, c.var_tol, c.seed, detail::descent_options()}));
  }
  bool ok = skipped.empty();
  for (const auto& x : certs)
    if (!x.heuristic && !x.pass()) ok = false;
  Output o;
  o.report["command"] = "certify";
  o.report["nonlinearity"] = spec.text();
  o.report["certificates"] = json::array();
  for (const auto& x : certs) o.report["certificates"].push_back(to_json(x));
  o.report["skipped"] = skipped;
  o.report["summaries"] = json::array();
  for (const auto& s : summarize(certs)) o.report["summaries"].push_back(to_json(s));
  o.report["status"] = ok ? "pass" : "fail";
  o.report["config"] = config_json(c);
  o.csv = certificates_csv(certs);
  o.code = ok ? 0 : 1;
  return o;
}

inline SolveReport run_solver(const NonlinearitySpec& spec, const Config& c, SolveMethod m, const GridFunction& start) {
  switch (m) {
    case SolveMethod::Picard: return picard(spec, start, c.solve_tol, c.max_iterations);
    case SolveMethod::Newton: return newton_solve(spec, start, c.solve_tol, c.max_iterations);
    default: return monotone_iterate(spec, start, m, c.solve_tol, c.max_iterations);
  }
}

inline std::string solution_csv(const SolveReport& r) {
  const auto& g = r.solution.grid;
  return csv({"t", "u", "u_tt", "f"}, {std::vector<double>(g.nodes().begin(), g.nodes().end()), r.solution.values,
                                      r.curvature.values, r.rhs.values});
}

inline Output cmd_solve(const Config& c) {
  const auto spec = detail::spec_of(c);
  const Grid g(c.panels);
  const auto start = c.start_level > 0.0 ? scaled_unit_load(g, c.start_level) : GridFunction::zeros(g);
  Output o;
  o.report["command"] = "solve";
  o.report["nonlinearity"] = spec.text();
  try {
    const auto r = run_solver(spec, c, c.method, start);
    o.report["report"] = to_json(r);
    o.csv = solution_csv(r);
    o.code = r.converged() ? 0 : 1;
  } catch (const DivergenceError& e) {
    o.report["error"] = e.what();
    o.report["trace"] = e.trace();
    o.code = 1;
  }
  o.report["status"] = o.code == 0 ? "pass" : "fail";
  o.report["config"] = config_json(c);
  return o;
}

inline Output cmd_minimize(const Config& c) {
  const auto spec = detail::spec_of(c);
  const Grid g(c.panels);
  auto [w0, w1] = detail::endpoints(c, g);
  std::vector<CurvatureRepr> starts{w0};
  if (w1) starts.push_back(*w1);
  const auto r = minimize_in_shell(spec, detail::need_shell(c), starts, c.var_tol, detail::descent_options());
  Output o;
  o.report["command"] = "minimize";
  o.report["nonlinearity"] = spec.text();
  o.report["result"] = to_json(r);
  o.report["status"] = r.converged ? "pass" : "fail";
  o.report["config"] = config_json(c);
  o.csv = point_csv(r.point);
  o.code = r.converged ? 0 : 1;
  return o;
}

inline Output cmd_mountain_pass(const Config& c) {
  const auto spec = detail::spec_of(c);
  const Grid g(c.panels);
  auto [w0, w1] = detail::endpoints(c, g);
  if (!w1) throw ConfigError("mountain-pass needs endpoints.u1_sup or endpoints.u1_norm");
  const auto r = mountain_pass(spec, detail::need_shell(c), w0, *w1, c.path_points, c.var_tol, detail::descent_options());
  const bool ok = r.converged && r.interior_pass;
  Output o;
  o.report["command"] = "mountain-pass";
  o.report["nonlinearity"] = spec.text();
  o.report["endpoint_energies"] = {energy(spec, w0), energy(spec, *w1)};
  o.report["result"] = to_json(r);
  o.report["status"] = ok ? "pass" : "fail";
  o.report["config"] = config_json(c);
  o.csv = point_csv(r.point);
  o.code = ok ? 0 : 1;
  return o;
}

inline Output cmd_eigen(const Config& c) {
  const Grid g(c.panels);
  const auto e = eigen_report(g);
  Output o;
  o.report["command"] = "eigen";
  o.report["beta"] = e.beta;
  o.report["beta_quoted"] = kQuotedBeta;
  o.report["beta_difference"] = e.beta - kQuotedBeta;
  o.report["lambda1"] = e.lambda1;
  o.report["energetic_norm"] = e.energetic_norm;
  o.report["normalized_L2"] = phi_normalized_l2();
  o.report["eigen_residual"] = e.eigen_residual;
  o.report["boundary_residual"] = e.boundary_residual;
  o.report["convex_ok"] = e.convex_ok;
  o.report["harnack_ok"] = e.harnack_ok;
  o.report["harnack_worst_slack"] = e.harnack_worst_slack;
  o.report["panels"] = c.panels;
  o.csv = csv({"t", "phi", "phi_t", "phi_tt"},
              {std::vector<double>(g.nodes().begin(), g.nodes().end()), e.phi.values, e.d1.values, e.d2.values});
  return o;
}

inline Output cmd_scan(const Config& c) {
  const auto spec = detail::spec_of(c);
  if (!c.scan_a && c.pairs.empty()) throw ConfigError("scan needs scan.a with scan.tau, or scan.pairs");
  Output o;
  o.report["command"] = "scan";
  o.report["nonlinearity"] = spec.text();
  if (c.scan_a) {
    if (c.taus.empty()) throw ConfigError("scan.a given without scan.tau");
    if (!spec.autonomous()) throw ConfigError("asymptotic scan needs a nonlinearity without t");
    const auto r = asymptotic_scan(spec, *c.scan_a, c.taus);
    json rows = json::array();
    std::vector<double> t, ratio, lo, up;
    for (const auto& row : r.rows) {
      rows.push_back({{"tau", row.tau}, {"ratio", row.ratio}, {"above_lower", row.above_lower},
                      {"below_upper", row.below_upper}});
      t.push_back(row.tau);
      ratio.push_back(row.ratio);
      lo.push_back(row.above_lower ? 1.0 : 0.0);
      up.push_back(row.below_upper ? 1.0 : 0.0);
    }
    o.report["asymptotic"] = {{"a", r.a},
                              {"lower_threshold", r.lower_threshold},
                              {"upper_threshold", r.upper_threshold},
                              {"lower_found", r.lower_found},
                              {"upper_found", r.upper_found},
                              {"R0_candidates", r.R0_candidates},
                              {"R1_candidates", r.R1_candidates},
                              {"certificates", {to_json(r.lower), to_json(r.upper)}},
                              {"rows", rows}};
    o.csv = csv({"tau", "ratio", "above_lower", "below_upper"}, {t, ratio, lo, up});
  }
  if (!c.pairs.empty()) {
    CertifyOptions opt;
    opt.quadrature = c.quadrature;
    const auto r = multiplicity_scan(spec, c.pairs, std::nullopt, opt);
    json pairs = json::array();
    for (const auto& p : r.pairs) {
      json h3 = p.pair.h3 ? json(*p.pair.h3) : json(nullptr);
      pairs.push_back({{"R0", p.pair.R0},
                       {"R1", p.pair.R1},
                       {"h3", h3},
                       {"pass", p.pass},
                       {"disjoint_from_previous", p.disjoint_from_previous},
                       {"counted", p.counted},
                       {"certificates", {to_json(p.first), to_json(p.second)}}});
    }
    o.report["multiplicity"] = {
        {"pairs", pairs}, {"predicted_solutions", r.predicted_solutions}, {"summary", r.summary}};
  }
  o.report["config"] = config_json(c);
  return o;
}

inline Output reproduce_cantilever_load(Config c) {
  c.nonlinearity = kCantileverLoadText;
  const auto spec = parse_spec(c.nonlinearity);
  CertifyOptions opt;
  opt.quadrature = c.quadrature;
  std::vector<Certificate> certs{check_h1(spec, opt)};
  const auto [a, b] = check_h2(spec, 1.0, 37.0, opt);
  certs.push_back(a);
  certs.push_back(b);
  const Grid g(c.panels);
  const auto down = monotone_iterate(spec, scaled_unit_load(g, 138.0), SolveMethod::MonotoneDown, c.solve_tol, 20000);
  const auto newton = newton_solve(spec, scaled_unit_load(g, 138.0), c.solve_tol, 200);
  const double gap = ::cantilever::detail::max_abs_diff(down.solution, newton.solution);
  const bool ok = a.pass() && b.pass() && down.converged() && newton.converged();
  Output o;
  o.report["command"] = "reproduce";
  o.report["example"] = "cantilever-load";
  o.report["nonlinearity"] = spec.text();
  o.report["certificates"] = json::array();
  for (const auto& x : certs) o.report["certificates"].push_back(to_json(x));
  o.report["summaries"] = json::array();
  for (const auto& s : summarize(certs)) o.report["summaries"].push_back(to_json(s));
  o.report["bound_route_h2b"] = 138.0 * 4.0 / 15.0;
  o.report["monotone_down"] = to_json(down);
  o.report["newton"] = to_json(newton);
  o.report["sup_disagreement"] = gap;
  o.report["status"] = ok ? "pass" : "fail";
  o.csv = solution_csv(newton);
  o.code = ok ? 0 : 1;
  return o;
}

inline Output reproduce_power_family(Config c) {
  if (!(c.p > 0.0 && c.p < 1.0)) {
    if (c.p == 0.0)
      throw ConfigError("p = 0 gives f = 0: every E(u) = |u|²/2, so max{E(u0),E(u1)} >= the sphere level and the "
                        "mountain-pass geometry cannot hold");
    throw ConfigError("power-family needs 0 < p < 1");
  }
  const Grid g(c.panels);
  const auto w0 = c.u0_norm * normalized_phi_curvature(g);
  const double sup0 = norms(w0).sup_of_u;
  json table = json::array();
  std::optional<int> found;
  double e0 = 0.0, e1 = 0.0;
  for (int b = c.b_min; b <= c.b_max; ++b) {
    const auto spec = parse_spec(power_family_text(c.p, b));
    e0 = energy(spec, w0);
    e1 = energy(spec, (b / sup0) * w0);
    table.push_back({{"b", b}, {"E_u0", e0}, {"E_u1", e1}});
    if (e0 < 0.5 && e1 < 0.5) {
      found = b;
      break;
    }
  }
  Output o;
  o.report["command"] = "reproduce";
  o.report["example"] = "power-family";
  o.report["p"] = c.p;
  o.report["b_scan"] = table;
  if (!found) {
    o.report["status"] = "fail";
    o.report["error"] = "no b in [" + std::to_string(c.b_min) + ", " + std::to_string(c.b_max) + "] gives E(u1) < 1/2";
    o.code = 1;
    return o;
  }
  const double b = *found;
  c.nonlinearity = power_family_text(c.p, b);
  const auto spec = parse_spec(c.nonlinearity);
  const auto w1 = (b / sup0) * w0;
  const ShellSpec shell = c.shell.value_or(ShellSpec{ShellVariant::Energetic, 1e-7, 2000.0});
  const auto h3 = check_h3(spec, shell, w0, w1, c.sphere_r, H3Options{c.starts, c.var_tol, c.seed, {}});
  const auto mn = minimize_in_shell(spec, shell, {w0}, c.var_tol);
  const auto mp = mountain_pass(spec, shell, w0, w1, c.path_points, c.var_tol);
  const bool distinct = mn.energy < mp.energy;
  const bool ok = mn.converged && mp.converged && mp.interior_pass && distinct;
  o.report["b"] = *found;
  o.report["nonlinearity"] = spec.text();
  o.report["E_u0"] = e0;
  o.report["E_u1"] = e1;
  o.report["norm_u1"] = norms(w1).energetic;
  o.report["shell"] = {{"variant", to_string(shell.variant)}, {"R0", shell.R0}, {"R1", shell.R1}};
  o.report["h3"] = to_json(h3);
  o.report["minimizer"] = to_json(mn);
  o.report["mountain_pass"] = to_json(mp);
  o.report["distinct_energies"] = distinct;
  o.report["note"] = "critical-point candidates from the discrete energy; their values are recorded, not certified";
  o.report["status"] = ok ? "pass" : "fail";
  const auto umn = u_from_curvature(mn.point), ump = u_from_curvature(mp.point);
  o.csv = csv({"t", "w_min", "u_min", "w_pass", "u_pass"},
              {std::vector<double>(g.nodes().begin(), g.nodes().end()), mn.point.w, umn.values, mp.point.w,
               ump.values});
  o.code = ok ? 0 : 1;
  return o;
}

// ---------------------------------------------------------------- driver

struct Flags {
  std::string config, example, out, which;
  std::optional<int> panels;
  std::optional<double> tol, p;
  std::optional<std::uint64_t> seed;
  bool json = false, csv = false;
};

inline Config load(const Flags& f, const std::string& command) {
  if (!f.config.empty() && !f.example.empty()) throw ConfigError("give --config or --example, not both");
  Config c;
  if (!f.config.empty()) {
    std::ifstream in(f.config, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + f.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    c = parse_config(j);
  } else if (!f.example.empty()) {
    c = example_config(f.example);
  }
  if (f.panels) c.panels = c.quadrature.panels = *f.panels;
  if (f.tol) c.solve_tol = c.var_tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.p) {
    c.p = *f.p;
    if (command != "reproduce" && f.example == "power-family") c.nonlinearity = power_family_text(c.p, 51.0);
  }
  validate(c);
  return c;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

inline Output dispatch(const std::string& command, const Flags& f) {
  Config c = load(f, command);
  if (command == "certify") return cmd_certify(c);
  if (command == "solve") return cmd_solve(c);
  if (command == "minimize") return cmd_minimize(c);
  if (command == "mountain-pass") return cmd_mountain_pass(c);
  if (command == "eigen") return cmd_eigen(c);
  if (command == "scan") return cmd_scan(c);
  const std::string which = !f.which.empty() ? f.which : f.example;
  if (which == "cantilever-load") return reproduce_cantilever_load(c);
  if (which == "power-family") return reproduce_power_family(c);
  throw ConfigError("reproduce: expected cantilever-load or power-family, got '" + which + "'");
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cantilever beam equation u'''' = f(t,u): solver, variational search and hypothesis certificates",
               "cantilever"};
  app.require_subcommand(1, 1);
  Flags f;
  app.add_option("--config", f.config, "JSON configuration file");
  app.add_option("--example", f.example, "built-in configuration: cantilever-load, power-family");
  app.add_option("--out", f.out, "directory for <command>.json and <command>.csv");
  app.add_option("--panels", f.panels, "grid panels, a power of two in [32, 4096]");
  app.add_option("--tol", f.tol, "solver and descent tolerance");
  app.add_option("--seed", f.seed, "seed for multi-start descent");
  app.add_flag("--json", f.json, "print the JSON report to stdout");
  app.add_flag("--csv", f.csv, "print the CSV table to stdout");
  app.add_option("--p", f.p, "exponent of the power family");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"certify", "check the configured hypotheses and print certificates"},
      {"solve", "solve u = J f(u) by picard, monotone or newton iteration"},
      {"minimize", "minimize the energy in the configured shell"},
      {"mountain-pass", "find a mountain-pass critical point between two endpoints"},
      {"eigen", "first eigenpair of the linear cantilever"},
      {"scan", "asymptotic growth scan and multiplicity scan"},
      {"reproduce", "rerun a built-in example end to end"}};
  for (const auto& [name, help] : commands) {
    auto* sc = app.add_subcommand(name, help);
    sc->fallthrough();
    if (name == "reproduce") sc->add_option("which", f.which, "cantilever-load or power-family");
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  Output o;
  try {
    o = dispatch(command, f);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "nonlinearity parse error: " << e.what() << '\n';
    return 2;
  } catch (const SpecError& e) {
    err << "nonlinearity error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << command << " failed: " << e.what() << '\n';
    return 1;
  }
  const std::string json_text = o.report.dump(2) + "\n";
  if (!f.out.empty()) {
    try {
      std::filesystem::create_directories(f.out);
      write_file(std::filesystem::path(f.out) / (command + ".json"), json_text);
      if (!o.csv.empty()) write_file(std::filesystem::path(f.out) / (command + ".csv"), o.csv);
    } catch (const std::exception& e) {
      err << "output error: " << e.what() << '\n';
      return 2;
    }
  }
  if (f.json || (!f.csv && f.out.empty())) out << json_text;
  if (f.csv) out << o.csv;
  return o.code;
}

}  // namespace cantilever::cli
