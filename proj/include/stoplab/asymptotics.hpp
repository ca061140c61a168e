#pragma once

#include <functional>
#include <string>

#include "stoplab/types.hpp"

namespace stoplab {

// Limiting eigenvalue law of (1/n) X^T X for n/d -> gamma: an atom of mass
// max(0, 1 - gamma) at zero plus a continuous part on [lower, upper].
struct MpLaw {
  double gamma = 1.0;
  double lower_edge = 0.0;  // (sqrt(1/gamma) - 1)^2
  double upper_edge = 4.0;  // (sqrt(1/gamma) + 1)^2
  double atom_mass = 0.0;

  explicit MpLaw(double gamma);
  [[nodiscard]] double density(double lambda) const;
  [[nodiscard]] double continuous_mass() const { return gamma < 1.0 ? gamma : 1.0; }
  [[nodiscard]] bool in_support(double lambda) const;
};

double mp_density(double gamma, double lambda);

struct QuadratureResult {
  double value = 0.0;
  double abs_value = 0.0;  // integral of |f| against the same measure
  int nodes = 0;
};

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  int max_nodes = 1 << 16;
};

// Integral of f against the continuous part of the law. Uses
// lambda = lower + (upper - lower) sin^2(u), which removes the square-root
// edge behaviour, then composite Gauss-Legendre panels doubled until two
// successive estimates agree. Throws NumericalError when the node cap is hit.
QuadratureResult integrate_mp(const MpLaw& law, const std::function<double(double)>& f,
                              const QuadratureOptions& options = {});

// Mass the law assigns to [lo, hi], the atom at zero included.
double mp_interval_mass(const MpLaw& law, double lo, double hi,
                        const QuadratureOptions& options = {});

// Limit of the over-setting risk derivative:
//   int (-2 |theta|^2 lambda e^{-2t lambda} + (2/gamma) sigma^2 (e^{-t lambda} - e^{-2t lambda})) dF
double asymptotic_risk_derivative(double gamma, double theta_norm_sq, double sigma_sq, double t,
                                  const QuadratureOptions& options = {});

struct SandwichValues {
  double lower = 0.0;
  double upper = 0.0;
  double exact = 0.0;
};

// Polynomial lower/upper envelopes of
//   -2 c |theta|^2 e^{-2 t lambda} + 2 sigma^2 (e^{-t lambda} - e^{-2 t lambda}) / lambda
// with bias coefficient c = 1. lambda must lie in the law's support.
SandwichValues sandwich_bounds(double gamma, double theta_norm_sq, double sigma_sq, double t,
                               double lambda);

// Sign intervals for the limiting derivative far from gamma = 1, where the
// support is [1/(4 gamma), 9/(4 gamma)] (gamma <= 1/4) or [1/4, 9/4] (gamma >= 4).
struct EdgeRegime {
  bool active = false;
  std::string name;            // "small_gamma", "large_gamma" or "none"
  double negative_until = 0.0;  // derivative < 0 for t below this
  double positive_from = 0.0;   // derivative > 0 for t above this
};

struct IntervalSet {
  double rho = 0.0;
  double decreasing_until = 0.0;
  double increasing_from = 0.0;  // NaN when (1 + rho)^2 < 6 rho
  double increasing_until = 0.0;
  bool applicable = false;
};

struct AsymptoticIntervals {
  double gamma = 0.0;
  IntervalSet primary;         // rho = (gamma + 1) |theta|^2 / sigma^2
  IntervalSet proof_variant;   // rho = ((gamma + 1) / gamma) |theta|^2 / sigma^2
  EdgeRegime edge;
};

IntervalSet interval_set(double gamma, double rho);
AsymptoticIntervals asymptotic_intervals(double gamma, double theta_norm_sq, double sigma_sq);

}  // namespace stoplab
