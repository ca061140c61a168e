#include <gtest/gtest.h>

#include <Eigen/QR>
#include <cmath>

#include "../support/oracles.hpp"
#include "stoplab/dynamics.hpp"
#include "stoplab/sampling.hpp"

using namespace stoplab;

namespace {
struct Problem {
  Matrix x;
  Vector y;
};

Problem make_problem(Index n, Index d, std::uint64_t seed) {
  CounterRng rng(RngStream{seed, 0});
  Problem p;
  p.x = sample_gaussian_matrix(n, d, rng);
  p.y = sample_gaussian_vector(n, 1.0, rng);
  return p;
}
}  // namespace

TEST(GradientFlow, StartsAtZero) {
  const Problem p = make_problem(10, 6, 40);
  EXPECT_EQ(gradient_flow_beta(eigen_spectrum(p.x), p.x, p.y, 0.0).norm(), 0.0);
}

TEST(GradientFlow, LongTimeIsMinNormLeastSquares) {
  for (auto [n, d] : {std::pair<Index, Index>{20, 8}, {8, 20}}) {
    const Problem p = make_problem(n, d, 41);
    const Spectrum s = eigen_spectrum(p.x);
    const double lambda_min = s.eigenvalues(s.rank() - 1);
    const Vector flow = gradient_flow_beta(s, p.x, p.y, 1e6 / lambda_min);
    const Vector pinv = p.x.completeOrthogonalDecomposition().solve(p.y);
    EXPECT_LE((flow - pinv).norm(), 1e-8 * std::max(1.0, pinv.norm()));
  }
}

TEST(GradientFlow, MatchesRungeKutta) {
  const Problem p = make_problem(20, 8, 42);
  const Vector closed = gradient_flow_beta(eigen_spectrum(p.x), p.x, p.y, 0.7);
  const Vector rk = stoplab::testing::rk4_flow(p.x, p.y, 0.7, 1e-3);
  EXPECT_LE((closed - rk).norm(), 1e-6);
}

TEST(GradientFlow, StaysInRowSpace) {
  const Problem p = make_problem(6, 15, 43);
  const Spectrum s = eigen_spectrum(p.x);
  const Vector b = gradient_flow_beta(s, p.x, p.y, 2.5);
  const Vector in_row = p.x.transpose() * p.x.transpose().completeOrthogonalDecomposition().solve(b);
  EXPECT_LE((b - in_row).norm(), 1e-9 * std::max(1.0, b.norm()));
}

TEST(GradientFlow, TrainingLossMonotone) {
  const Problem p = make_problem(12, 30, 44);
  const GradientFlow flow(eigen_spectrum(p.x), p.x, p.y);
  double previous = p.y.squaredNorm();
  for (double t = 0.05; t < 20.0; t *= 1.3) {
    const double loss = (p.y - p.x * flow.beta(t)).squaredNorm();
    EXPECT_LE(loss, previous + 1e-12);
    previous = loss;
  }
}

TEST(GradientFlow, RejectsMismatch) {
  const Problem p = make_problem(5, 4, 45);
  const Spectrum s = eigen_spectrum(p.x);
  EXPECT_THROW(gradient_flow_beta(s, p.x, Vector::Zero(3), 1.0), InvalidArgument);
  EXPECT_THROW(gradient_flow_beta(s, p.x, p.y, -1.0), InvalidArgument);
  EXPECT_THROW(gradient_flow_beta(eigen_spectrum(p.x, SpectrumMode::kValuesOnly), p.x, p.y, 1.0),
               InvalidArgument);
}

TEST(GradientDescent, ZeroStepsIsOrigin) {
  const Problem p = make_problem(5, 4, 46);
  const GdTrajectory traj = gradient_descent(p.x, p.y, 0.01, 0);
  ASSERT_EQ(traj.iterates.size(), 1u);
  EXPECT_EQ(traj.iterates[0].norm(), 0.0);
}

TEST(GradientDescent, ScalarClosedForm) {
  // n = d = 1, x = 1, y = c: b_k = c (1 - (1 - h)^k).
  Matrix x(1, 1);
  x << 1.0;
  Vector y(1);
  y << 2.5;
  const double h = 0.1;
  const GdTrajectory traj = gradient_descent(x, y, h, 50);
  for (std::size_t k = 0; k <= 50; ++k)
    EXPECT_NEAR(traj.iterates[k](0), 2.5 * (1.0 - std::pow(1.0 - h, static_cast<double>(k))), 1e-13);
}

TEST(Discretization, ZeroLabelsGiveZeroBound) {
  const Problem p = make_problem(10, 5, 47);
  const Vector zero = Vector::Zero(10);
  EXPECT_EQ(discretization_bound(p.x, zero, 0.01), 0.0);
  EXPECT_EQ(sharp_discretization_bound(p.x, zero, 0.01), 0.0);
  EXPECT_EQ(measure_discretization_gap(p.x, zero, 0.01, 100).max_gap, 0.0);
}

TEST(Discretization, DisplayedBoundIsQuadraticInStep) {
  const Problem p = make_problem(30, 10, 48);
  const double s_max = largest_curvature(p.x);
  const double h = 0.01 / s_max;
  const double ratio = discretization_bound(p.x, p.y, h) / discretization_bound(p.x, p.y, h / 2.0);
  EXPECT_GE(ratio, 3.9);
  EXPECT_LE(ratio, 4.1);
}

TEST(Discretization, SharpBoundHolds) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = make_problem(30, 10, 49 + seed);
    const double h = 0.005 / largest_curvature(p.x);
    const DiscretizationGap gap = measure_discretization_gap(p.x, p.y, h, 2000);
    EXPECT_LE(gap.max_gap, sharp_discretization_bound(p.x, p.y, h));
    EXPECT_GT(gap.max_gap, 0.0);
  }
}

TEST(Discretization, InapplicableStepThrows) {
  const Problem p = make_problem(10, 5, 55);
  const double s_max = largest_curvature(p.x);
  EXPECT_THROW(discretization_bound(p.x, p.y, 1.0 / s_max), NumericalError);
  EXPECT_THROW(sharp_discretization_bound(p.x, p.y, 2.0 / s_max), NumericalError);
  EXPECT_THROW(discretization_bound(p.x, p.y, 0.0), InvalidArgument);
}
