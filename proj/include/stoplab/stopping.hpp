#pragma once

#include <functional>
#include <string>

#include "stoplab/risk.hpp"

namespace stoplab {

// The derivative never turns nonnegative on the search grid (for example a
// noiseless problem, where the risk decreases forever).
class NoInteriorOptimum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The derivative is already nonnegative at the left probe point.
class DegenerateInstance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct StoppingResult {
  double t_opt = 0.0;
  double bracket_lower = 0.0;
  double bracket_upper = 0.0;
  double derivative_at_t_opt = 0.0;
  int evaluations = 0;
};

struct StoppingSearchOptions {
  int grid_points = 2048;
  double grid_lower = 1e-4;   // times t_scale
  double grid_upper = 1e4;    // times t_scale
  double probe = 1e-6;        // times t_scale
  double relative_width = 1e-8;
};

// First local minimum of a risk curve given its derivative: scans a geometric
// grid for the first negative -> positive sign change (grid values that are
// exactly zero are skipped) and bisects it.
StoppingResult find_topt(const std::function<double(double)>& derivative, double t_scale,
                         const StoppingSearchOptions& options = {});

// n/(n+d) for over, n||theta||^2 / (p sigma^2 + (p-d)||theta||^2) for under.
double default_t_scale(const ModelSpec& spec);

StoppingResult find_topt_over(const Spectrum& spectrum, const ModelSpec& spec);
StoppingResult find_topt_under(const UnderRiskModel& model);

struct BoundInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool hypothesis_satisfied = false;
  std::string hypothesis_note;
  double gamma = 0.0;  // aspect quantity used by the bound (0 when not applicable)

  [[nodiscard]] bool contains(double t) const { return lower <= t && t <= upper; }
};

// Interval for t_opt in the over setting; holds with probability at least
// 1 - 2/n (n <= d, gamma <= 1) or 1 - 2/d (n > d, gamma >= 1) over X.
BoundInterval theorem1_bounds(const ModelSpec& spec);

// Interval for t_opt in the under setting, valid when
// (8n + 9d + 16)||theta||^2 <= p(sigma^2 + ||theta||^2).
BoundInterval theorem2_bounds(const ModelSpec& spec);

struct Prop1Bounds {
  double t_bar = 0.0;  // alpha n / (n + d)
  McEstimate lower;    // sigma^2 + E_X[sum exp(-2 t_bar lambda_i)] ||theta||^2 / d
  McEstimate upper;    // lower + alpha sigma^2 / 2
};

// Bounds on E_X[expected risk at t_bar] in the over setting, with the
// expectation over X estimated from `trials` sampled spectra.
Prop1Bounds prop1_risk_bounds(double alpha, const ModelSpec& spec, Index trials,
                              const RngStream& stream, int workers = 1);

struct Prop2Bounds {
  double t_bar = 0.0;  // n||theta||^2 / (p sigma^2 + (p-d)||theta||^2)
  double lower = 0.0;
  double upper = 0.0;
  bool ratio_ok = false;  // lower >= 0.8 upper
  bool hypothesis_satisfied = false;
};

Prop2Bounds prop2_risk_bounds(const ModelSpec& spec);

}  // namespace stoplab
