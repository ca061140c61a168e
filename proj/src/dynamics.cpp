#include "stoplab/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace stoplab {

GradientFlow::GradientFlow(const Spectrum& spectrum, const Matrix& x, const Vector& y)
    : basis_(spectrum.eigenvectors),
      eigenvalues_(spectrum.eigenvalues.head(spectrum.eigenvectors.cols())),
      samples_(static_cast<double>(x.rows())) {
  require(spectrum.has_eigenvectors(), "gradient_flow_beta: spectrum lacks eigenvectors");
  require(y.size() == x.rows(), "gradient_flow_beta: y length must equal the row count of X");
  require(x.cols() == spectrum.dimension(), "gradient_flow_beta: spectrum does not match X");
  projected_ = basis_.transpose() * (x.transpose() * y);
  for (Index i = 0; i < projected_.size(); ++i)
    if (!spectrum.rank_mask[static_cast<std::size_t>(i)]) projected_(i) = 0.0;
}

Vector GradientFlow::beta(double t) const {
  require(t >= 0.0, "gradient_flow_beta: t must be nonnegative");
  Vector weights(projected_.size());
  for (Index i = 0; i < weights.size(); ++i) {
    const double lambda = eigenvalues_(i);
    weights(i) = projected_(i) == 0.0
                     ? 0.0
                     : -std::expm1(-t * lambda) / (samples_ * lambda) * projected_(i);
  }
  return basis_ * weights;
}

Vector gradient_flow_beta(const Spectrum& spectrum, const Matrix& x, const Vector& y, double t) {
  return GradientFlow(spectrum, x, y).beta(t);
}

GdTrajectory gradient_descent(const Matrix& x, const Vector& y, double step_size, Index steps) {
  require(step_size > 0.0, "gradient_descent: step size must be positive");
  require(steps >= 0, "gradient_descent: step count must be nonnegative");
  require(y.size() == x.rows(), "gradient_descent: y length must equal the row count of X");

  const double scale = step_size / static_cast<double>(x.rows());
  const Matrix gram = x.transpose() * x;
  const Vector drive = scale * (x.transpose() * y);

  GdTrajectory out;
  out.step_size = step_size;
  out.iterates.reserve(static_cast<std::size_t>(steps) + 1);
  out.iterates.push_back(Vector::Zero(x.cols()));
  for (Index k = 0; k < steps; ++k) {
    const Vector& b = out.iterates.back();
    out.iterates.push_back(b - scale * (gram * b) + drive);
  }
  return out;
}

double largest_curvature(const Matrix& x) {
  const Matrix second_moment = (x.transpose() * x) / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(second_moment, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

namespace {
double checked_curvature(const Matrix& x, const Vector& y, double step_size) {
  require(y.size() == x.rows(), "discretization_bound: y length must equal the row count of X");
  require(step_size > 0.0, "discretization_bound: step size must be positive");
  const double s_max = largest_curvature(x);
  if (step_size * s_max >= 1.0)
    throw NumericalError("discretization_bound: inapplicable, step size must be below 1/s_max");
  return s_max;
}
}  // namespace

double discretization_bound(const Matrix& x, const Vector& y, double step_size) {
  const double s_max = checked_curvature(x, y, step_size);
  const double n = static_cast<double>(x.rows());
  return step_size / (2.0 * n) * (x.transpose() * y).norm() * std::expm1(step_size * s_max);
}

double sharp_discretization_bound(const Matrix& x, const Vector& y, double step_size) {
  const double s_max = checked_curvature(x, y, step_size);
  const double n = static_cast<double>(x.rows());
  return step_size * (x.transpose() * y).norm() /
         (2.0 * std::numbers::e * n * (1.0 - step_size * s_max));
}

DiscretizationGap measure_discretization_gap(const Matrix& x, const Vector& y, double step_size,
                                             Index steps) {
  const GdTrajectory path = gradient_descent(x, y, step_size, steps);
  const GradientFlow flow(eigen_spectrum(x), x, y);
  DiscretizationGap out;
  out.step_size = step_size;
  out.steps = steps;
  for (Index k = 0; k <= steps; ++k) {
    const double gap =
        (path.iterates[static_cast<std::size_t>(k)] - flow.beta(static_cast<double>(k) * step_size))
            .norm();
    if (gap > out.max_gap) {
      out.max_gap = gap;
      out.worst_step = k;
    }
  }
  return out;
}

}  // namespace stoplab
