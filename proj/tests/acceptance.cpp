// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <cantilever/certify.hpp>
#include <cantilever/eigenpair.hpp>
#include <cantilever/examples.hpp>
#include <cantilever/solver.hpp>
#include <cantilever/variational.hpp>
#include <cli.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace cantilever;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %2d %s: %s (%.3fs) %s\n", id, o.pass ? "PASS" : "FAIL", title, secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const NonlinearitySpec& load_spec() {
  static const NonlinearitySpec s = parse_spec(kCantileverLoadText);
  return s;
}

CertifyOptions with_panels(int n) {
  CertifyOptions o;
  o.quadrature.panels = n;
  return o;
}

GridFunction random_load(std::mt19937_64& rng, const Grid& g, bool nondecreasing) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(g.size());
  double acc = U(rng) * (nondecreasing ? 1.0 : 0.0);
  for (auto& x : v) {
    if (nondecreasing) {
      acc += U(rng) < 0.3 ? U(rng) * 5.0 : 0.0;
      x = acc;
    } else {
      x = U(rng) < 0.2 ? 0.0 : U(rng) * 10.0;
    }
  }
  return GridFunction(g, std::move(v));
}

CurvatureRepr random_curvature(std::mt19937_64& rng, const Grid& g, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  return CurvatureRepr::sample(g, [&](double) { return U(rng); });
}

CurvatureRepr lin(double a, const CurvatureRepr& x, double b, const CurvatureRepr& y) {
  auto out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.w[i] = a * x.w[i] + b * y.w[i];
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome minorant_integral() {
  const auto t0 = std::chrono::steady_clock::now();
  const double v = integrate([](double t) { const double m = minorant(Minorant::M0, t); return m * m; }, 0.0, 1.0).value;
  const double secs = seconds_since(t0);
  const double err = std::abs(v - 1.0 / 4536.0);
  return {err <= 1e-12 && secs < 0.1, fmt("|int M0^2 - 1/4536| = %.3g, %.4fs", err, secs)};
}

Outcome h2_example() {
  bool ok = true;
  std::ostringstream d;
  const auto [a0, b0] = check_h2(load_spec(), 1.0, 37.0, with_panels(128));
  for (int n : {128, 256, 512}) {
    const auto [a, b] = check_h2(load_spec(), 1.0, 37.0, with_panels(n));
    ok = ok && a.pass() && b.pass();
    ok = ok && std::abs(a.lhs - 1.014109) <= 1e-6;
    ok = ok && b.lhs <= 36.8 && std::abs(b.lhs - 36.8) <= 1e-3;
    ok = ok && std::abs(a.margin - a0.margin) <= 1e-6 && std::abs(b.margin - b0.margin) <= 1e-6;
    d << "n=" << n << " h2a " << fmt("%.9f", a.lhs) << " h2b " << fmt("%.7f", b.lhs) << "; ";
  }
  // f ≤ 138 with t = x² makes the bound integrand polynomial.
  const double m1 = integrate([](double x) { return minorant(Minorant::M1, x * x) * 2 * x; }, 0.0, 1.0).value;
  const double bound_err = std::abs(138.0 * m1 - 36.8);
  ok = ok && bound_err <= 1e-12;
  d << "bound route error " << fmt("%.2g", bound_err);
  return {ok, d.str()};
}

Outcome eigenpair() {
  const auto e = eigen_report(Grid(256));
  const double max_phi = e.phi.sup_abs();
  // Integral form φ = λ₁ J φ, independent of the analytic fourth derivative.
  const double b = e.beta, lam = e.lambda1;
  std::vector<double> cuts;
  for (int i = 1; i < 64; ++i) cuts.push_back(i / 64.0);
  const JAction fine([b, lam](double s) { return lam * phi1(b, s, 0); }, cuts, 16);
  double integral_residual = 0.0;
  for (std::size_t i = 0; i < e.phi.grid.size(); ++i)
    integral_residual = std::max(integral_residual, std::abs(fine.u(e.phi.grid[i]) - e.phi.values[i]));
  const double residual = std::max({e.eigen_residual, e.boundary_residual, integral_residual});
  const bool ok = std::abs(e.beta - 1.8751040687) <= 1e-6 && std::abs(kQuotedBeta - e.beta) <= 2e-4 &&
                  residual < 1e-8 * max_phi;
  return {ok, fmt("beta %.10f, quoted gap %.2g, residual %.2g", e.beta, std::abs(kQuotedBeta - e.beta), residual)};
}

Outcome green_function() {
  double asym = 0.0, worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double t = i / 100.0, s = j / 100.0, g = green(t, s);
      asym = std::max(asym, std::abs(g - green(s, t)));
      worst_slack = std::min({worst_slack, g - (3 - t) * t * t * s * s / 6.0, s * s / 2.0 - g, green(1.0, s) - g, g});
    }
  }
  const double j1 = integrate([](double s) { return green(1.0, s); }, 0.0, 1.0).value;
  const bool ok = asym < 1e-15 && worst_slack >= -1e-15 && std::abs(j1 - 0.125) <= 1e-10;
  return {ok, fmt("asymmetry %.2g, worst slack %.2g, (J1)(1) - 1/8 = %.2g", asym, worst_slack, j1 - 0.125)};
}

Outcome harnack() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(64);
  double worst = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    const auto u = apply_J(random_load(rng, g, false));
    const double sup = u.sup_abs();
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::min(worst, u.values[i] - minorant(Minorant::M, g[i]) * sup);
  }
  std::mt19937_64 rng2(99);
  for (int k = 0; k < 200; ++k) {
    const auto ja = JAction::piecewise_linear(random_load(rng2, g, true));
    const auto u = ja.on(g);
    const double en = ja.energetic_norm();
    worst = std::min(worst, kSupEmbedding * en - u.sup_abs());
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::min(worst, u.values[i] - minorant(Minorant::M0, g[i]) * en);
      worst = std::min(worst, minorant(Minorant::M1, g[i]) * en - u.values[i]);
    }
  }
  const double secs = seconds_since(t0);
  return {worst >= -1e-9 && secs < 5.0, fmt("400 samples, worst slack %.3g, %.3fs", worst, secs)};
}

std::string pp_text(double p, double b) { return power_family_text(p, b); }

Outcome gradient_consistency() {
  const Grid g(64);
  std::mt19937_64 rng(2025);
  const std::vector<NonlinearitySpec> specs{parse_spec(pp_text(0.5, 5.0)), parse_spec("[0,inf): (1+t)*u^2 + t"),
                                            load_spec()};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto& spec = specs[static_cast<std::size_t>(k) % specs.size()];
    const double scale = k % 3 == 2 ? 0.05 : 3.0;
    const auto w = random_curvature(rng, g, 0.0, scale);
    const auto dw = random_curvature(rng, g, -1.0, 1.0);
    const double h = 1e-5;
    const double fd = (energy(spec, lin(1, w, h, dw)) - energy(spec, lin(1, w, -h, dw))) / (2 * h);
    const double an = l2_inner(energy_gradient(spec, w), dw);
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-3));
  }
  return {worst < 1e-6, fmt("50 pairs, worst relative error %.3g", worst)};
}

Outcome solver_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(256);
  const auto m = monotone_iterate(load_spec(), scaled_unit_load(g, 138.0), SolveMethod::MonotoneDown, 1e-10, 2000);
  const auto n = newton_solve(load_spec(), m.solution, 1e-11, 50);
  const double gap = detail::max_abs_diff(n.solution, m.solution);
  const double secs = seconds_since(t0);
  const bool ok = m.converged() && n.converged() && g.size() == 257 && gap < 1e-7 && m.residual_sup < 1e-8 &&
                  n.residual_sup < 1e-8 && m.convex_ok && m.cone_M_ok && m.cone_M0_ok && secs < 10.0;
  return {ok, fmt("disagreement %.3g, residual %.3g, %.3fs", gap, m.residual_sup, secs)};
}

Outcome power_family() {
  const auto out = cli::reproduce_power_family(cli::example_config("power-family"));
  const auto& j = out.report;
  if (!j.contains("b")) return {false, "no b found"};
  const double e0 = j["E_u0"].get<double>(), e1 = j["E_u1"].get<double>();
  const double bound = j["h3"]["rhs"].get<double>();
  const double pg_min = j["minimizer"]["projected_gradient_norm"].get<double>();
  const double pg_mp = j["mountain_pass"]["projected_gradient_norm"].get<double>();
  const double en_min = j["minimizer"]["energy"].get<double>(), en_mp = j["mountain_pass"]["energy"].get<double>();
  const bool ok = e0 < 0.5 && e1 < 0.5 && bound >= 0.5 - 1e-3 && pg_min < 1e-5 && pg_mp < 1e-5 && en_min < en_mp;
  std::ostringstream d;
  d << "b " << j["b"].get<int>() << fmt(", E(u0) %.6f, E(u1) %.4g", e0, e1) << fmt(", sphere bound %.6f", bound)
    << fmt(", pg %.2g / %.2g", pg_min, pg_mp) << fmt(", energies %.4g < %.4g", en_min, en_mp);
  return {ok, d.str()};
}

Outcome zero_nonlinearity() {
  const Grid g(128);
  const auto zero = parse_spec("[0,inf): 0");
  std::mt19937_64 rng(4);
  const auto r = minimize_in_shell(zero, {ShellVariant::Energetic, 1.0, 2.0},
                                   {random_curvature(rng, g, 0.0, 1.0), normalized_phi_curvature(g)});
  double worst = std::abs(r.energy - 0.5);
  bool ok = r.converged && r.inner_active && std::abs(r.point_norms.energetic - 1.0) <= 1e-8;
  for (double rad : {0.5, 2.0, 3.0}) worst = std::max(worst, std::abs(sphere_inf(zero, rad, 3, 1e-6, g).value - 0.5 * rad * rad));
  ok = ok && worst <= 1e-8;
  return {ok, fmt("minimum %.12f at inner sphere, worst deviation %.3g", r.energy, worst)};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"certify", "--example", "cantilever-load"},  {"certify", "--example", "power-family"},
      {"solve", "--example", "cantilever-load"},    {"minimize", "--example", "power-family"},
      {"mountain-pass", "--example", "power-family"}, {"eigen"},
      {"scan", "--example", "power-family"},        {"reproduce", "cantilever-load"},
      {"reproduce", "power-family"}};
  const auto root = std::filesystem::temp_directory_path() / "cantilever_acceptance";
  int compared = 0;
  for (const auto& cmd : commands) {
    std::string first_json, first_csv;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / std::to_string(rep);
      std::filesystem::remove_all(dir);
      std::filesystem::create_directories(dir);
      auto args = cmd;
      args.insert(args.end(), {"--out", dir.string()});
      std::ostringstream out, err;
      cli::run(args, out, err);
      const auto js = slurp(dir / (cmd[0] + ".json")), cs = slurp(dir / (cmd[0] + ".csv"));
      if (js.empty() || cs.empty()) return {false, cmd[0] + ": missing output"};
      if (rep == 0) {
        first_json = js;
        first_csv = cs;
      } else if (js != first_json || cs != first_csv) {
        return {false, cmd[0] + ": outputs differ between runs"};
      }
    }
    ++compared;
  }
  std::filesystem::remove_all(root);
  return {true, std::to_string(compared) + " commands, JSON and CSV byte-identical"};
}

}  // namespace

int main() {
  criterion(1, "minorant integral", minorant_integral);
  criterion(2, "shell hypotheses on the cantilever load", h2_example);
  criterion(3, "first eigenpair", eigenpair);
  criterion(4, "Green function", green_function);
  criterion(5, "Harnack inequalities", harnack);
  criterion(6, "energy gradient", gradient_consistency);
  criterion(7, "monotone iteration against Newton", solver_agreement);
  criterion(8, "power family critical points", power_family);
  criterion(9, "zero nonlinearity", zero_nonlinearity);
  criterion(10, "deterministic CLI output", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
