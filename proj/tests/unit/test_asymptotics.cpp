#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stoplab/asymptotics.hpp"
#include "stoplab/risk.hpp"

using namespace stoplab;

TEST(MpLaw, SquareCaseDensity) {
  const MpLaw law(1.0);
  EXPECT_NEAR(law.lower_edge, 0.0, 1e-15);
  EXPECT_NEAR(law.upper_edge, 4.0, 1e-15);
  EXPECT_EQ(law.atom_mass, 0.0);
  for (double lambda : {0.1, 1.0, 2.0, 3.9})
    EXPECT_NEAR(mp_density(1.0, lambda), std::sqrt(4.0 - lambda) / std::sqrt(lambda) / (2.0 * std::numbers::pi), 1e-13);
  EXPECT_EQ(mp_density(1.0, 4.5), 0.0);
  EXPECT_EQ(mp_density(1.0, -0.1), 0.0);
  EXPECT_THROW(mp_density(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(MpLaw(-1.0), InvalidArgument);
}

TEST(MpLaw, MomentIdentities) {
  for (double gamma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const MpLaw law(gamma);
    const double mass = integrate_mp(law, [](double) { return 1.0; }).value;
    const double mean = integrate_mp(law, [](double l) { return l; }).value;
    const double second = integrate_mp(law, [](double l) { return l * l; }).value;
    EXPECT_NEAR(mass, std::min(1.0, gamma), 1e-8) << gamma;
    EXPECT_NEAR(mean, 1.0, 1e-7) << gamma;
    EXPECT_NEAR(second, 1.0 + 1.0 / gamma, 1e-7 * (1.0 + 1.0 / gamma)) << gamma;
    EXPECT_NEAR(law.atom_mass, std::max(0.0, 1.0 - gamma), 1e-15);
  }
}

TEST(MpLaw, IntervalMassIncludesAtom) {
  const MpLaw law(0.5);
  EXPECT_NEAR(mp_interval_mass(law, -1.0, 100.0), 1.0, 1e-8);
  EXPECT_NEAR(mp_interval_mass(law, -1.0, law.lower_edge * 0.5), 0.5, 1e-12);
  const double mid = 0.5 * (law.lower_edge + law.upper_edge);
  EXPECT_NEAR(mp_interval_mass(law, law.lower_edge, mid) + mp_interval_mass(law, mid, law.upper_edge), 0.5, 1e-8);
}

TEST(MpLaw, NodeCapRaises) {
  QuadratureOptions tight;
  tight.max_nodes = 20;
  tight.relative_tolerance = 1e-15;
  EXPECT_THROW(integrate_mp(MpLaw(1.0), [](double l) { return std::sin(50.0 * l); }, tight), NumericalError);
}

TEST(AsymptoticDerivative, EndpointsInTime) {
  for (double gamma : {0.5, 1.0, 2.0})
    EXPECT_NEAR(asymptotic_risk_derivative(gamma, 1.5, 1.0, 0.0), -3.0, 1e-7) << gamma;
  // Away from gamma = 1 the support is bounded away from zero and the decay is exponential.
  for (double gamma : {0.5, 2.0}) EXPECT_NEAR(asymptotic_risk_derivative(gamma, 1.5, 1.0, 1e4), 0.0, 1e-12);
  // At gamma = 1 the density ~ lambda^{-1/2} at the lower edge gives a t^{-1/2} tail.
  const double a = asymptotic_risk_derivative(1.0, 1.5, 1.0, 1e4);
  const double b = asymptotic_risk_derivative(1.0, 1.5, 1.0, 1e6);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(b / a, 0.1, 0.01);
  EXPECT_THROW(asymptotic_risk_derivative(1.0, 1.0, 1.0, -1.0), InvalidArgument);
}

TEST(AsymptoticDerivative, MatchesFiniteSpectra) {
  // Moderate size here; the full-size check lives in the acceptance suite.
  const Index n = 400;
  const Index d = 200;
  const ModelSpec spec{Setting::kOver, n, d, 10, 1.0, 1.0};
  for (double t : {0.2, 1.0, 3.0}) {
    double mean = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const Spectrum s = eigen_spectrum(sample_gaussian_matrix(n, d, RngStream{90, k}), SpectrumMode::kValuesOnly);
      mean += risk_derivative_over(s, spec, t) / 10.0;
    }
    const double limit = asymptotic_risk_derivative(2.0, 1.0, 1.0, t);
    EXPECT_NEAR(mean, limit, 0.05 * std::abs(limit) + 1e-3) << t;
  }
}

TEST(Sandwich, TightAtZero) {
  const MpLaw law(1.0);
  const SandwichValues v = sandwich_bounds(1.0, 2.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(v.exact, -4.0, 1e-14);
  EXPECT_LE(v.lower, v.exact + 1e-12);
  EXPECT_GE(v.upper, v.exact - 1e-12);
  EXPECT_THROW(sandwich_bounds(1.0, 1.0, 1.0, 1.0, law.upper_edge + 1.0), InvalidArgument);
}

TEST(Sandwich, HoldsOnGrid) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    const MpLaw law(gamma);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
      const double lambda = law.lower_edge + (law.upper_edge - law.lower_edge) * (i + 0.5) / 100.0;
      for (int j = 0; j < 100; ++j) {
        const double t = 10.0 * j / 99.0 / lambda;
        const SandwichValues v = sandwich_bounds(gamma, 1.0, 1.0, t, lambda);
        const double slack = 1e-12 * std::max(1.0, std::abs(v.exact));
        violations += (v.lower > v.exact + slack) || (v.exact > v.upper + slack);
      }
    }
    EXPECT_EQ(violations, 0) << gamma;
  }
}

TEST(Intervals, SquareExample) {
  const AsymptoticIntervals iv = asymptotic_intervals(1.0, 0.05, 1.0);
  EXPECT_NEAR(iv.primary.rho, 0.1, 1e-15);
  EXPECT_TRUE(iv.primary.applicable);
  EXPECT_NEAR(iv.primary.decreasing_until, 0.5 * 0.1 / 1.1, 1e-15);
  const double rho = 0.1;
  EXPECT_NEAR(iv.primary.increasing_from,
              rho / (1 + rho + std::sqrt((1 + rho) * (1 + rho) - 6 * rho)), 1e-15);
  EXPECT_NEAR(iv.primary.increasing_until, 0.25, 1e-15);
  EXPECT_LE(iv.primary.decreasing_until, iv.primary.increasing_from);
  EXPECT_FALSE(iv.edge.active);
}

TEST(Intervals, LargeRhoNotApplicable) {
  EXPECT_FALSE(interval_set(1.0, 2.0 - std::sqrt(3.0)).applicable);
  EXPECT_FALSE(interval_set(1.0, 0.5).applicable);
  EXPECT_TRUE(std::isnan(interval_set(1.0, 1.0).increasing_from));
  EXPECT_FALSE(interval_set(5.0, 0.1).applicable);
  EXPECT_THROW(asymptotic_intervals(1.0, 1.0, 0.0), InvalidArgument);
}

TEST(Intervals, QuadratureSignsAgree) {
  const AsymptoticIntervals iv = asymptotic_intervals(1.0, 0.05, 1.0);
  const IntervalSet& s = iv.primary;
  for (int k = 1; k <= 50; ++k) {
    const double t_down = s.decreasing_until * k / 51.0;
    EXPECT_LE(asymptotic_risk_derivative(1.0, 0.05, 1.0, t_down), 0.0) << t_down;
    const double t_up = s.increasing_from + (s.increasing_until - s.increasing_from) * k / 51.0;
    EXPECT_GE(asymptotic_risk_derivative(1.0, 0.05, 1.0, t_up), 0.0) << t_up;
  }
}

TEST(Intervals, EdgeRegimes) {
  const AsymptoticIntervals small = asymptotic_intervals(0.2, 1.0, 1.0);
  EXPECT_TRUE(small.edge.active);
  EXPECT_EQ(small.edge.name, "small_gamma");
  EXPECT_LT(asymptotic_risk_derivative(0.2, 1.0, 1.0, 0.5 * small.edge.negative_until), 0.0);
  EXPECT_GT(asymptotic_risk_derivative(0.2, 1.0, 1.0, 2.0 * small.edge.positive_from), 0.0);

  const AsymptoticIntervals large = asymptotic_intervals(5.0, 1.0, 1.0);
  EXPECT_EQ(large.edge.name, "large_gamma");
  EXPECT_LT(asymptotic_risk_derivative(5.0, 1.0, 1.0, 0.5 * large.edge.negative_until), 0.0);
  EXPECT_GT(asymptotic_risk_derivative(5.0, 1.0, 1.0, 2.0 * large.edge.positive_from), 0.0);
}
