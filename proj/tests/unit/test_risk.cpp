#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "../support/oracles.hpp"
#include "stoplab/risk.hpp"

using namespace stoplab;

namespace {
ModelSpec over_spec(Index n, Index d, Index p, double theta, double sigma) {
  return ModelSpec{Setting::kOver, n, d, p, theta, sigma};
}
ModelSpec under_spec(Index n, Index d, Index p, double theta, double sigma) {
  return ModelSpec{Setting::kUnder, n, d, p, theta, sigma};
}
}  // namespace

TEST(ModelSpec, Constraints) {
  EXPECT_NO_THROW(over_spec(10, 20, 20, 1, 1).validate());
  EXPECT_THROW(over_spec(10, 20, 21, 1, 1).validate(), InvalidArgument);
  EXPECT_THROW(under_spec(10, 20, 19, 1, 1).validate(), InvalidArgument);
  EXPECT_THROW(over_spec(10, 20, 5, 1, 0).validate(), InvalidArgument);
  EXPECT_THROW(over_spec(10, 20, 5, -1, 1).validate(), InvalidArgument);
  EXPECT_THROW(over_spec(0, 20, 5, 1, 1).validate(), InvalidArgument);
  EXPECT_EQ(parse_setting("under"), Setting::kUnder);
  EXPECT_THROW(parse_setting("sideways"), InvalidArgument);
}

TEST(PopulationRisk, ZeroPredictorAndTruth) {
  RngStream stream{60, 0};
  const ModelSpec over = over_spec(5, 6, 3, 2.0, 0.5);
  const SemiOrthogonal p = sample_haar_semi_orthogonal(3, 6, Orientation::kRowOrthonormal, stream);
  EXPECT_NEAR(population_risk(Vector::Zero(6), p, over), 2.5, 1e-12);
  const Vector truth = p.entries.transpose() * over.theta_star();
  EXPECT_NEAR(population_risk(truth, p, over), 0.5, 1e-12);

  const ModelSpec under = under_spec(5, 3, 6, 2.0, 0.5);
  const SemiOrthogonal q = sample_haar_semi_orthogonal(6, 3, Orientation::kColumnOrthonormal, stream);
  EXPECT_NEAR(population_risk(Vector::Zero(3), q, under), 2.5, 1e-12);
  EXPECT_THROW(population_risk(Vector::Zero(4), q, under), InvalidArgument);
}

TEST(RiskOver, AnchorAtZero) {
  const ModelSpec spec = over_spec(20, 50, 10, 3.0, 0.7);
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(20, 50, RngStream{61, 0}));
  EXPECT_NEAR(expected_risk_over(s, spec, 0.0), 3.7, 1e-12);
  double sum = 0.0;
  for (Index i = 0; i < 50; ++i) sum += s.eigenvalues(i);
  EXPECT_NEAR(risk_derivative_over(s, spec, 0.0), -2.0 * 3.0 / 50.0 * sum, 1e-10);
}

TEST(RiskOver, LongTimeLimit) {
  const ModelSpec spec = over_spec(20, 50, 10, 3.0, 0.7);
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(20, 50, RngStream{62, 0}));
  double inv = 0.0;
  for (Index i = 0; i < s.rank(); ++i) inv += 1.0 / s.eigenvalues(i);
  const double limit = 0.7 + 30.0 / 50.0 * 3.0 + 0.7 / 20.0 * inv;
  EXPECT_NEAR(expected_risk_over(s, spec, 1e7), limit, 1e-9);
  EXPECT_NEAR(risk_derivative_over(s, spec, 1e7), 0.0, 1e-12);
}

TEST(RiskOver, DerivativeMatchesFiniteDifference) {
  const ModelSpec spec = over_spec(30, 40, 10, 2.0, 1.0);
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(30, 40, RngStream{63, 0}));
  const double floor = 1e-4 * std::abs(risk_derivative_over(s, spec, 0.0));
  for (double t : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double h = 1e-5 * std::max(1.0, t);
    const double fd = (expected_risk_over(s, spec, t + h) - expected_risk_over(s, spec, t - h)) / (2 * h);
    const double exact = risk_derivative_over(s, spec, t);
    EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(std::abs(exact), floor)) << t;
  }
}

TEST(RiskOver, BayesFloor) {
  const ModelSpec spec = over_spec(10, 30, 5, 1.0, 0.3);
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(10, 30, RngStream{64, 0}));
  for (double t = 0.0; t < 100.0; t = 1.5 * t + 0.01)
    EXPECT_GE(expected_risk_over(s, spec, t), spec.sigma_sq - 1e-12);
}

TEST(RiskOver, RejectsMismatchedSpectrum) {
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(10, 30, RngStream{65, 0}));
  EXPECT_THROW(expected_risk_over(s, over_spec(10, 31, 5, 1, 1), 1.0), InvalidArgument);
  EXPECT_THROW(expected_risk_over(s, under_spec(10, 30, 31, 1, 1), 1.0), InvalidArgument);
  EXPECT_THROW(expected_risk_over(s, over_spec(10, 30, 5, 1, 1), -1.0), InvalidArgument);
}

TEST(RiskOver, AgreesWithSimulation) {
  const ModelSpec spec = over_spec(40, 60, 10, 4.0, 1.0);
  const Matrix x = sample_gaussian_matrix(40, 60, RngStream{66, 0});
  const Spectrum s = eigen_spectrum(x);
  const std::vector<double> times{0.05, 0.3, 1.0, 3.0};
  const std::vector<McEstimate> mc = mc_risk_oracle_over(x, spec, times, 4000, RngStream{66, 1});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double exact = expected_risk_over(s, spec, times[k]);
    const double gap = std::abs(mc[k].estimate - exact);
    EXPECT_TRUE(gap <= 0.02 * exact || gap <= 3.0 * mc[k].std_error)
        << "t=" << times[k] << " exact=" << exact << " mc=" << mc[k].estimate << " se=" << mc[k].std_error;
  }
}

TEST(RiskOver, HaarAverageIdentity) {
  // E ||P^T theta||^2 over Haar row-orthonormal P equals ||theta||^2 and puts
  // mass ||theta||^2 / d on each coordinate on average.
  const Index p = 3;
  const Index d = 9;
  Vector theta = Vector::Zero(p);
  theta(0) = 2.0;
  std::vector<double> first(4000);
  for (std::size_t k = 0; k < first.size(); ++k) {
    const SemiOrthogonal proj = sample_haar_semi_orthogonal(p, d, Orientation::kRowOrthonormal, RngStream{67, k});
    const Vector b = proj.entries.transpose() * theta;
    first[k] = b(0) * b(0);
  }
  const McEstimate e = stoplab::testing::mean_se(first);
  EXPECT_LT(std::abs(e.estimate - 4.0 / 9.0), 3.0 * e.std_error);
}

TEST(RiskUnder, AnchorAndInitialSlope) {
  const ModelSpec spec = under_spec(30, 20, 50, 2.0, 0.5);
  const UnderRiskModel model(spec, 400, RngStream{68, 0});
  const McEstimate r0 = model.risk(0.0);
  EXPECT_NEAR(r0.estimate, 2.5, 1e-12);
  EXPECT_LE(r0.std_error, 1e-12);
  const McEstimate d0 = model.derivative(0.0);
  EXPECT_LT(std::abs(d0.estimate - (-2.0 * 2.0 * 20.0 / 50.0)), 3.0 * d0.std_error + 1e-12);
}

TEST(RiskUnder, DerivativeIsExactForEstimate) {
  const ModelSpec spec = under_spec(30, 20, 50, 2.0, 0.5);
  const UnderRiskModel model(spec, 100, RngStream{69, 0});
  for (double t : {0.05, 0.5, 2.0}) {
    const double h = 1e-5;
    const double fd = (model.risk(t + h).estimate - model.risk(t - h).estimate) / (2 * h);
    EXPECT_NEAR(fd, model.derivative(t).estimate, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(RiskUnder, StandardErrorShrinksWithTrials) {
  const ModelSpec spec = under_spec(20, 10, 30, 2.0, 0.5);
  const double small = UnderRiskModel(spec, 500, RngStream{70, 0}).risk(0.8).std_error;
  const double large = UnderRiskModel(spec, 2000, RngStream{70, 1}).risk(0.8).std_error;
  const double ratio = small / large;
  EXPECT_GE(ratio, 1.7);
  EXPECT_LE(ratio, 2.3);
}

TEST(RiskUnder, AgreesWithSimulation) {
  const ModelSpec spec = under_spec(30, 15, 40, 3.0, 1.0);
  const UnderRiskModel model(spec, 4000, RngStream{71, 0});
  const std::vector<double> times{0.01, 0.3, 2.0};
  const std::vector<McEstimate> mc = mc_risk_oracle_under(spec, times, 4000, RngStream{71, 1});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const McEstimate fast = model.risk(times[k]);
    const double se = std::hypot(fast.std_error, mc[k].std_error);
    const double gap = std::abs(fast.estimate - mc[k].estimate);
    EXPECT_TRUE(gap <= 0.02 * fast.estimate || gap <= 3.0 * se)
        << "t=" << times[k] << " model=" << fast.estimate << " mc=" << mc[k].estimate;
  }
}

TEST(RiskUnder, DeterministicPerStream) {
  const ModelSpec spec = under_spec(10, 5, 8, 1.0, 1.0);
  const McEstimate a = expected_risk_under(spec, 0.4, 50, RngStream{72, 3});
  const McEstimate b = expected_risk_under(spec, 0.4, 50, RngStream{72, 3});
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_THROW(expected_risk_under(over_spec(10, 5, 5, 1, 1), 0.4, 50, RngStream{}), InvalidArgument);
}

TEST(RiskUnder, ParallelMatchesSerial) {
  const ModelSpec spec = under_spec(12, 6, 9, 1.0, 1.0);
  const UnderRiskModel serial(spec, 64, RngStream{73, 0}, 1);
  const UnderRiskModel parallel(spec, 64, RngStream{73, 0}, 4);
  EXPECT_EQ(serial.eigenvalues(), parallel.eigenvalues());
}
