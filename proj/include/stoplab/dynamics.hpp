#pragma once

#include <vector>

#include "stoplab/spectral.hpp"
#include "stoplab/types.hpp"

namespace stoplab {

// Closed-form gradient flow on (1/2n)||y - X b||^2 started at b(0) = 0:
//   b(t) = (X^T X)^+ (I - exp(-t X^T X / n)) X^T y,
// evaluated in the eigenbasis of (1/n) X^T X. Construction projects X^T y once
// so repeated evaluations cost O(d k).
class GradientFlow {
 public:
  GradientFlow(const Spectrum& spectrum, const Matrix& x, const Vector& y);

  [[nodiscard]] Vector beta(double t) const;
  [[nodiscard]] Index dimension() const { return basis_.rows(); }

 private:
  Matrix basis_;
  Vector eigenvalues_;
  Vector projected_;  // V^T X^T y, zeroed on masked-out directions
  double samples_;
};

Vector gradient_flow_beta(const Spectrum& spectrum, const Matrix& x, const Vector& y, double t);

struct GdTrajectory {
  double step_size = 0.0;
  std::vector<Vector> iterates;  // b_0 = 0, ..., b_K
};

// b_{k+1} = b_k - (h/n) X^T X b_k + (h/n) X^T y from b_0 = 0.
GdTrajectory gradient_descent(const Matrix& x, const Vector& y, double step_size, Index steps);

// Largest eigenvalue of X^T X / n.
double largest_curvature(const Matrix& x);

// Displayed uniform-in-k gap bound (h / 2n) ||X^T y|| (e^{h s_max} - 1).
// Throws NumericalError when h >= 1 / s_max.
double discretization_bound(const Matrix& x, const Vector& y, double step_size);

// h ||X^T y|| / (2 e n (1 - h s_max)), from
// e^{-lk} - (1-l)^k <= k e^{-lk} l^2 / (2(1-l)) <= l / (2e(1-l)) for 0 < l < 1.
// Same applicability condition as discretization_bound.
double sharp_discretization_bound(const Matrix& x, const Vector& y, double step_size);

// Largest distance between the gradient-descent iterates and the flow at the
// matching times kh, k = 0..steps.
struct DiscretizationGap {
  double step_size = 0.0;
  Index steps = 0;
  double max_gap = 0.0;
  Index worst_step = 0;
};

DiscretizationGap measure_discretization_gap(const Matrix& x, const Vector& y, double step_size,
                                             Index steps);

}  // namespace stoplab
