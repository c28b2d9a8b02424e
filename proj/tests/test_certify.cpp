#include <cantilever/certify.hpp>
#include <cantilever/examples.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cantilever;

namespace {

const NonlinearitySpec& load_spec() {
  static const NonlinearitySpec s = parse_spec(kCantileverLoadText);
  return s;
}

double quartic(double t) { return (t * t * t * t - 4 * t * t * t + 6 * t * t) / 24.0; }

// ∫M₁ f(M₁R₁) for the load: 138∫M₁ minus the deficit where M₁R₁ < 0.03, in closed form.
double h2b_oracle(double R1) {
  const double ts = std::pow(0.03 / (R1 * 2.0 / 3.0), 2.0 / 3.0);
  const double full = 138.0 * (2.0 / 3.0) * (2.0 / 5.0);
  const double cap = 138.0 * (2.0 / 3.0) * (2.0 / 5.0) * std::pow(ts, 2.5);
  const double lin = 4600.0 * R1 * (4.0 / 9.0) * std::pow(ts, 4.0) / 4.0;
  return full - cap + lin;
}

QuadratureConfig panels(int n) {
  QuadratureConfig c;
  c.panels = n;
  return c;
}

CertifyOptions with_panels(int n) {
  CertifyOptions o;
  o.quadrature = panels(n);
  return o;
}

}  // namespace

TEST(Certificate, StrictDominance) {
  EXPECT_EQ(make_certificate(Hypothesis::h2a, 1.0, 1.0, Direction::AtLeast, 0.0, false).verdict, Verdict::FAIL);
  EXPECT_EQ(make_certificate(Hypothesis::h2a, 1.5, 1.0, Direction::AtLeast, 0.5, false).verdict, Verdict::FAIL);
  EXPECT_EQ(make_certificate(Hypothesis::h2a, 1.1, 1.0, Direction::AtLeast, 1e-9, false).verdict, Verdict::PASS);
  const auto up = make_certificate(Hypothesis::h2b, 2.0, 3.0, Direction::AtMost, 0.0, false);
  EXPECT_EQ(up.margin, 1.0);
  EXPECT_TRUE(up.pass());
}

TEST(H1, SampledVerdicts) {
  const auto ok = check_h1(load_spec());
  EXPECT_TRUE(ok.pass());
  EXPECT_TRUE(ok.heuristic);
  EXPECT_EQ(ok.lhs, 0.0);
  const auto bad = check_h1(parse_spec("[0,1): 1-0.5*u ; [1,inf): 0.5"));
  EXPECT_FALSE(bad.pass());
  EXPECT_NEAR(bad.lhs, 0.5, 1e-12);  // f(0)=1 to f(1)=0.5
  EXPECT_FALSE(bad.notes.empty());
}

TEST(H2, CantileverLoadExample) {
  const auto [a, b] = check_h2(load_spec(), 1.0, 37.0);
  EXPECT_NEAR(a.lhs, 4600.0 / 4536.0, 1e-10);
  EXPECT_NEAR(a.margin, 4600.0 / 4536.0 - 1.0, 1e-10);
  EXPECT_TRUE(a.pass());
  EXPECT_NEAR(b.lhs, h2b_oracle(37.0), 1e-10);
  EXPECT_LE(b.lhs, 36.8);
  EXPECT_NEAR(b.lhs, 36.8, 1e-3);
  // The bound route: f ≤ 138 gives 138·∫M₁ = 184/5; t = x² makes the integrand polynomial.
  const double m1 = integrate([](double x) { return minorant(Minorant::M1, x * x) * 2 * x; }, 0.0, 1.0).value;
  EXPECT_NEAR(138.0 * m1, 36.8, 1e-12);
  EXPECT_TRUE(b.pass());
  EXPECT_FALSE(a.heuristic);
  EXPECT_FALSE(b.heuristic);
}

TEST(H2, MarginsStableAcrossResolutions) {
  const auto [a0, b0] = check_h2(load_spec(), 1.0, 37.0, with_panels(128));
  for (int n : {256, 512}) {
    const auto [a, b] = check_h2(load_spec(), 1.0, 37.0, with_panels(n));
    EXPECT_NEAR(a.margin, a0.margin, 1e-6);
    EXPECT_NEAR(b.margin, b0.margin, 1e-6);
  }
}

TEST(H2, FailuresAndMonotonicityInR0) {
  // M₀(t)·1.02 stays below 0.03, so the integral scales with R0 and (a) still holds.
  const auto a = check_h2(load_spec(), 1.02, 37.0).first;
  EXPECT_TRUE(a.pass());
  EXPECT_NEAR(a.margin, 4600.0 * 1.02 / 4536.0 - 1.02, 1e-10);
  // Beyond saturation the integral is at most 138·∫M₀ = 138·√2/120 < 2.
  const auto big = check_h2(load_spec(), 2.0, 37.0).first;
  EXPECT_FALSE(big.pass());
  EXPECT_LE(big.lhs, 138.0 * std::numbers::sqrt2 / 120.0);
  for (double r0 : {0.5, 0.25}) {
    const auto c = check_h2(load_spec(), r0, 37.0).first;
    EXPECT_TRUE(c.pass()) << r0;
    EXPECT_NEAR(c.lhs, 4600.0 * r0 / 4536.0, 1e-10);
  }
  const auto z = check_h2(parse_spec("[0,inf): 0"), 1.0, 2.0).first;
  EXPECT_FALSE(z.pass());
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_THROW(check_h2(load_spec(), 2.0, 1.0), PreconditionError);
  EXPECT_THROW(check_h2(parse_spec("[0,1): 1-0.5*u ; [1,inf): 0.5"), 1.0, 2.0), PreconditionError);
}

TEST(F2, Examples) {
  const double m = 9.0 * std::numbers::sqrt2 / 512.0;
  EXPECT_NEAR(f2_lower_threshold(0.75), 1.0 / (0.25 * m * m), 1e-9);
  EXPECT_NEAR(f2_lower_threshold(0.75), 4.0 * 512.0 * 512.0 / 162.0, 1e-9);
  const auto [lo, up] = check_f2(parse_spec("[0,inf): 5.625*u"), 0.5, 1.0, 3.0);
  EXPECT_EQ(up.lhs, 3.75);
  EXPECT_EQ(up.margin, 0.0);
  EXPECT_FALSE(up.pass());
  const auto pp = parse_spec(power_family_text(0.5, 51.0));
  const auto small = check_f2(pp, 0.75, 1e-9, 1.0).first;
  EXPECT_TRUE(small.pass());
  EXPECT_THROW(check_f2(parse_spec("[0,inf): t*u"), 0.5, 1.0, 2.0), PreconditionError);
  EXPECT_THROW(check_f2(pp, 1.0, 1.0, 2.0), PreconditionError);
}

TEST(R0, Examples) {
  const auto [za, zb] = check_r0(parse_spec("[0,inf): 0"), 0.1, 0.5);
  EXPECT_FALSE(za.pass());
  EXPECT_EQ(za.lhs, 0.0);
  const auto c2 = parse_spec("[0,inf): 2");
  const auto [a, b] = check_r0(c2, 0.1, 0.5);
  EXPECT_NEAR(a.lhs, 2.0 / 8.0, 1e-12);
  EXPECT_NEAR(b.lhs, 2.0 / 8.0, 1e-12);
  EXPECT_TRUE(a.pass());
  EXPECT_TRUE(b.pass());
  EXPECT_FALSE(check_r0(c2, 0.3, 0.5).first.pass());
  EXPECT_FALSE(check_r0(c2, 0.1, 0.2).second.pass());
  // Small α: f̲ = 4600·M·α, and ∫G(1,s)M(s)ds = 11/210.
  const auto la = check_r0(load_spec(), 1e-3, 20.0).first;
  EXPECT_NEAR(la.lhs, 4600.0 * 1e-3 * 11.0 / 210.0, 1e-12);
  EXPECT_TRUE(la.pass());
  EXPECT_THROW(check_r0(c2, 0.5, 0.5), PreconditionError);
  EXPECT_THROW(check_r0(c2, -1.0, 0.5), PreconditionError);
}

TEST(R0, RegimeLabelFollowsOrdering) {
  const auto c2 = parse_spec("[0,inf): 2");
  for (auto [al, be] : {std::pair{0.1, 0.5}, std::pair{0.5, 0.1}, std::pair{1.0, 3.0}, std::pair{3.0, 0.2}}) {
    const auto [a, b] = check_r0(c2, al, be);
    const std::string want = be > al ? "compression" : "expansion";
    EXPECT_EQ(a.label("regime"), want);
    EXPECT_EQ(b.label("regime"), want);
  }
}

TEST(TwoNorm, Examples) {
  const double j1 = std::sqrt(integrate([](double t) { return quartic(t) * quartic(t); }, 0.0, 1.0).value);
  const auto [a, b] = check_H1(parse_spec("[0,inf): 3"), 0.01, 1.0);
  EXPECT_NEAR(a.lhs, 3.0 * j1, 1e-12);
  EXPECT_NEAR(b.lhs, 2.0, 1e-12);
  EXPECT_TRUE(a.pass());
  EXPECT_FALSE(b.pass());
  EXPECT_TRUE(check_H1(parse_spec("[0,inf): 3"), 0.01, 2.5).second.pass());
  EXPECT_FALSE(check_H1(parse_spec("[0,inf): 0"), 0.01, 1.0).first.pass());
  EXPECT_THROW(check_H1(parse_spec("[0,inf): 3"), 0.5, 1.0), PreconditionError);
}

TEST(TwoNorm, IndicatorRouteMatchesDirectQuadrature) {
  const double a = 0.5;
  auto jchi = [a](double t) {
    const double brk[] = {t};
    return integrate_split([t](double s) { return green(t, s); }, a, 1.0, brk).value;
  };
  const double oracle = std::sqrt(integrate([&](double t) { const double x = jchi(t); return x * x; }, 0.0, 1.0).value);
  EXPECT_NEAR(indicator_image_l2(a), oracle, 1e-10);
  const auto c = check_H1_indicator(parse_spec("[0,inf): 3"), 0.05, a);
  EXPECT_NEAR(c.lhs, 3.0 * oracle, 1e-10);
  EXPECT_EQ(c.hypothesis, Hypothesis::H1a);
  EXPECT_EQ(c.label("route"), "indicator");
  EXPECT_EQ(c.pass(), 3.0 * oracle > 0.05);
}

TEST(Certificates, DoubledResolutionWithinEstimate) {
  const auto pp = parse_spec(power_family_text(0.5, 5.0));
  auto run = [&](int n) {
    const auto o = with_panels(n);
    std::vector<Certificate> out;
    for (const auto* s : {&load_spec(), &pp}) {
      auto [a, b] = check_h2(*s, 0.5, 30.0, o);
      auto [c, d] = check_r0(*s, 0.01, 10.0, o);
      auto [e, f] = check_H1(*s, 0.05, 10.0, o);
      out.insert(out.end(), {a, b, c, d, e, f, check_H1_indicator(*s, 0.05, 0.5, o)});
    }
    return out;
  };
  const auto base = run(128), fine = run(256);
  ASSERT_EQ(base.size(), fine.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_LT(std::abs(fine[i].margin - base[i].margin), base[i].quadrature_error_estimate)
        << to_string(base[i].hypothesis) << " #" << i;
  }
}

TEST(H3, ZeroSpecAndPreconditions) {
  const Grid g(64);
  const auto zero = parse_spec("[0,inf): 0");
  const auto w0 = normalized_phi_curvature(g);
  const ShellSpec shell{ShellVariant::Energetic, 0.5, 4.0};
  const auto c = check_h3(zero, shell, w0, 3.0 * w0, 2.0, {.starts = 2});
  EXPECT_TRUE(c.heuristic);
  EXPECT_NEAR(c.rhs, 2.0, 1e-8);
  // E(u₁) = ½|u₁|² = 4.5 exceeds the sphere level, so the geometry fails.
  EXPECT_NEAR(c.lhs, 4.5, 1e-10);
  EXPECT_FALSE(c.pass());
  EXPECT_THROW(check_h3(zero, shell, w0, 1.5 * w0, 2.0), OrderingError);
  EXPECT_THROW(check_h3(zero, ShellSpec{ShellVariant::Energetic, 1.5, 4.0}, w0, 3.0 * w0, 2.0), PreconditionError);
}

TEST(H3, PowerFamilyGeometry) {
  const Grid g(128);
  const auto spec = parse_spec(power_family_text(0.5, 51.0));
  const auto [w0, w1] = power_family_endpoints(51.0, g);
  const auto c = check_h3(spec, ShellSpec{ShellVariant::Energetic, 1e-7, 2000.0}, w0, w1, 2.0, {.starts = 3});
  EXPECT_LT(c.lhs, 0.5);
  EXPECT_GE(c.rhs, 0.5 - 1e-3);
  EXPECT_TRUE(c.pass());
}

TEST(Asymptotic, Examples) {
  std::vector<double> taus;
  for (int k = -12; k <= 8; ++k) taus.push_back(std::pow(10.0, k));
  const auto pp = asymptotic_scan(parse_spec(power_family_text(0.5, 51.0)), 0.75, taus);
  EXPECT_TRUE(pp.lower_found);
  EXPECT_TRUE(pp.upper_found);
  EXPECT_TRUE(pp.rows.front().above_lower);
  EXPECT_TRUE(pp.rows.back().below_upper);
  EXPECT_TRUE(pp.lower.heuristic && pp.upper.heuristic);
  EXPECT_TRUE(pp.lower.pass());
  EXPECT_TRUE(pp.upper.pass());
  const double m0 = minorant(Minorant::M0, 0.75);
  EXPECT_NEAR(pp.R0_candidates.front(), taus.front() / m0, 1e-20);
  EXPECT_EQ(pp.R1_candidates.back(), 1.5 * taus.back());

  const auto lin = asymptotic_scan(parse_spec("[0,inf): 5*u"), 0.75, taus);
  for (const auto& r : lin.rows) EXPECT_NEAR(r.ratio, 5.0, 1e-12);
  EXPECT_FALSE(lin.lower_found);
  EXPECT_TRUE(lin.upper_found);

  // The load ratio is 4600 below 0.03; the lower threshold exceeds 4600 for every a.
  const auto load = asymptotic_scan(load_spec(), 0.75, taus);
  EXPECT_NEAR(load.rows.front().ratio, 4600.0, 1e-9);
  EXPECT_TRUE(load.upper_found);
  EXPECT_FALSE(load.lower_found);
  double least = 1e300;
  for (int i = 1; i < 1000; ++i) least = std::min(least, f2_lower_threshold(i / 1000.0));
  EXPECT_GT(least, 4600.0);

  const std::vector<double> bad{1.0, 0.5};
  EXPECT_THROW(asymptotic_scan(load_spec(), 0.75, bad), PreconditionError);
}

TEST(Multiplicity, Examples) {
  const std::vector<RadiusPair> overlap{{0.5, 37.0, std::nullopt}, {0.25, 40.0, std::nullopt}};
  const auto o = multiplicity_scan(load_spec(), overlap);
  EXPECT_TRUE(o.pairs[0].pass && o.pairs[1].pass);
  EXPECT_FALSE(o.pairs[1].disjoint_from_previous);
  EXPECT_FALSE(o.pairs[1].counted);
  EXPECT_EQ(o.predicted_solutions, 1);
  const std::vector<RadiusPair> single{{1.0, 37.0, true}};
  EXPECT_EQ(multiplicity_scan(load_spec(), single).predicted_solutions, 2);
  const std::vector<RadiusPair> single_no{{1.0, 37.0, std::nullopt}};
  EXPECT_EQ(multiplicity_scan(load_spec(), single_no).predicted_solutions, 1);
  // ∫M₀ f(M₀·40) ≤ 138∫M₀ ≈ 1.6 < 40.
  const std::vector<RadiusPair> failing{{40.0, 100.0, std::nullopt}};
  const auto f = multiplicity_scan(load_spec(), failing);
  EXPECT_FALSE(f.pairs[0].pass);
  EXPECT_EQ(f.predicted_solutions, 0);
}

TEST(Multiplicity, TwoDisjointPassingPairsPredictFour) {
  // Linear, flat, steep linear, flat: the first flat part caps h2b at 138·4/15 on (1, 37);
  // the steep part (slope 1e4 > 4536) gives h2a at 1e5, the last cap 2.97e7·4/15 < 1e7 gives h2b.
  const auto spec =
      parse_spec("[0,0.03): 4600*u ; [0.03,30): 138 ; [30,3000): 138 + 10000*(u-30) ; [3000,inf): 29700138");
  const std::vector<RadiusPair> pairs{{1.0, 37.0, true}, {1.0e5, 1.0e7, true}};
  const auto r = multiplicity_scan(spec, pairs);
  ASSERT_TRUE(r.pairs[0].pass);
  ASSERT_TRUE(r.pairs[1].pass);
  EXPECT_TRUE(r.pairs[1].disjoint_from_previous);
  EXPECT_EQ(r.predicted_solutions, 4);
  EXPECT_EQ(r.summary, "4 solutions predicted");
}

TEST(Summary, TheoremVerdicts) {
  std::vector<Certificate> certs{check_h1(load_spec())};
  const auto [a, b] = check_h2(load_spec(), 1.0, 37.0);
  certs.push_back(a);
  certs.push_back(b);
  const auto s = summarize(certs);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].name, "shell_existence");
  EXPECT_TRUE(s[0].applicable);
  EXPECT_TRUE(s[0].verdict);
  EXPECT_TRUE(s[0].conditional_on_h1);
  EXPECT_FALSE(s[1].applicable);
  EXPECT_EQ(s[2].conclusion, "not run");
}
