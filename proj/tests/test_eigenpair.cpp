#include <cantilever/eigenpair.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace cantilever;

namespace {

// Plain bisection on cos x cosh x + 1 over (1.5, 3.0).
double bisection_oracle() {
  double lo = 1.5, hi = 3.0;
  auto g = [](double x) { return std::cos(x) * std::cosh(x) + 1.0; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) > 0) == (g(lo) > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Beta, MatchesBisectionOracle) {
  const double beta = solve_beta(1e-12);
  EXPECT_NEAR(beta, bisection_oracle(), 1e-12);
  EXPECT_NEAR(beta, 1.8751040687, 1e-10);
  EXPECT_LT(std::abs(frequency_equation(beta)), 1e-12);
  EXPECT_THROW(solve_beta(0.0), PreconditionError);
}

TEST(Beta, QuotedValueAgreesToFourDecimals) {
  EXPECT_NEAR(kQuotedBeta, 1.8749963, 1e-7);
  EXPECT_LT(std::abs(solve_beta() - kQuotedBeta), 2e-4);
}

TEST(Phi, BoundaryConditions) {
  const double b = solve_beta();
  EXPECT_NEAR(phi1(b, 0.0, 0), 0.0, 1e-12);
  EXPECT_NEAR(phi1(b, 0.0, 1), 0.0, 1e-12);
  EXPECT_NEAR(phi1(b, 1.0, 2), 0.0, 1e-9);
  EXPECT_NEAR(phi1(b, 1.0, 3), 0.0, 1e-9);
  EXPECT_THROW(phi1(b, 0.5, 5), PreconditionError);
  EXPECT_THROW(phi1(b, 1.5, 0), DomainError);
}

TEST(Phi, DerivativesMatchFiniteDifferences) {
  const double b = solve_beta();
  const double h = 1e-4;
  for (double t : {0.2, 0.5, 0.8}) {
    for (int k = 0; k < 4; ++k) {
      const double fd = (phi1(b, t + h, k) - phi1(b, t - h, k)) / (2 * h);
      EXPECT_NEAR(phi1(b, t, k + 1), fd, 1e-6) << "t=" << t << " order " << k + 1;
    }
  }
}

TEST(Report, Examples) {
  const auto e = eigen_report(Grid(256));
  EXPECT_EQ(e.lambda1, e.beta * e.beta * e.beta * e.beta);
  EXPECT_NEAR(e.lambda1, 12.3624, 1e-4);
  EXPECT_TRUE(e.convex_ok);
  EXPECT_TRUE(e.harnack_ok);
  EXPECT_LT(e.eigen_residual, 1e-8 * e.phi.sup_abs());
  EXPECT_LT(e.boundary_residual, 1e-9);
  EXPECT_NEAR(e.phi.values.front(), 0.0, 1e-12);
  EXPECT_NEAR(e.d1.values.front(), 0.0, 1e-12);
  EXPECT_THROW(eigen_report(Grid(32)), PreconditionError);
}

TEST(Report, NormalizedHasUnitEnergeticNorm) {
  const auto e = eigen_report(Grid(128));
  // Independent route: energetic norm of the normalized function from its curvature, by quadrature.
  const double n = e.energetic_norm, b = e.beta;
  const double sq = integrate([&](double t) { const double d = phi1(b, t, 2) / n; return d * d; }, 0.0, 1.0).value;
  EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-10);
  for (std::size_t i = 0; i < e.phi.values.size(); ++i)
    EXPECT_DOUBLE_EQ(e.phi_normalized.values[i] * n, e.phi.values[i]);
}

TEST(Report, IntegralFormOfEigenEquation) {
  const Grid g(128);
  const auto e = eigen_report(g);
  const double b = e.beta;
  const auto u = apply_J([b](double s) { return phi1(b, s, 0); }, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(e.lambda1 * u.values[i], e.phi.values[i], 1e-7) << g[i];
}

TEST(Report, NondecreasingAndConvex) {
  const auto e = eigen_report(Grid(256));
  for (std::size_t i = 1; i < e.phi.values.size(); ++i) {
    EXPECT_GE(e.phi.values[i], e.phi.values[i - 1]);
    EXPECT_GE(e.d1.values[i], -1e-12);
    EXPECT_GE(e.d2.values[i], -1e-9);
  }
  EXPECT_GE(e.harnack_worst_slack, -1e-9);
}
