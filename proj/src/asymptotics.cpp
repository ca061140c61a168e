#include "stoplab/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace stoplab {
namespace {

constexpr int kPanelOrder = 20;

// (e^{-x} - e^{-2x}) / x, continuous at zero.
double decay_ratio(double x) {
  if (x < 1e-8) return 1.0 - 1.5 * x;
  return (std::exp(-x) - std::exp(-2.0 * x)) / x;
}

}  // namespace

MpLaw::MpLaw(double gamma_in) : gamma(gamma_in) {
  require(gamma > 0.0 && std::isfinite(gamma), "MpLaw: gamma must be positive");
  const double root = std::sqrt(1.0 / gamma);
  lower_edge = (root - 1.0) * (root - 1.0);
  upper_edge = (root + 1.0) * (root + 1.0);
  atom_mass = std::max(0.0, 1.0 - gamma);
}

double MpLaw::density(double lambda) const {
  if (!(lambda > lower_edge && lambda < upper_edge) || lambda <= 0.0) return 0.0;
  return gamma / (2.0 * std::numbers::pi) *
         std::sqrt((upper_edge - lambda) * (lambda - lower_edge)) / lambda;
}

bool MpLaw::in_support(double lambda) const {
  const double slack = 1e-12 * upper_edge;
  return lambda >= lower_edge - slack && lambda <= upper_edge + slack;
}

double mp_density(double gamma, double lambda) { return MpLaw(gamma).density(lambda); }

namespace {

// Integral over u in [u_lo, u_hi] after lambda = a + (b - a) sin^2(u).
QuadratureResult integrate_substituted(const MpLaw& law, const std::function<double(double)>& f,
                                       double u_lo, double u_hi,
                                       const QuadratureOptions& options) {
  using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;
  const double a = law.lower_edge;
  const double width = law.upper_edge - a;
  const double scale = law.gamma / (2.0 * std::numbers::pi) * width * width * 2.0;

  auto panel_sum = [&](int panels, bool absolute) {
    const double step = (u_hi - u_lo) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
      total += Rule::integrate(
          [&](double u) {
            const double s = std::sin(u);
            const double c = std::cos(u);
            const double lambda = a + width * s * s;
            // The square root and the Jacobian each carry sin u cos u.
            const double weight = scale * s * s * c * c / lambda;
            const double value = f(lambda) * weight;
            return absolute ? std::abs(value) : value;
          },
          u_lo + k * step, u_lo + (k + 1) * step);
    }
    return total;
  };

  QuadratureResult out;
  int panels = 1;
  double previous = panel_sum(panels, false);
  while (true) {
    panels *= 2;
    if (panels * kPanelOrder > options.max_nodes)
      throw NumericalError("integrate_mp: quadrature did not converge within the node cap");
    const double current = panel_sum(panels, false);
    const double magnitude = panel_sum(panels, true);
    if (std::abs(current - previous) <= options.relative_tolerance * magnitude ||
        magnitude == 0.0) {
      out.value = current;
      out.abs_value = magnitude;
      out.nodes = panels * kPanelOrder;
      return out;
    }
    previous = current;
  }
}

double to_angle(const MpLaw& law, double lambda) {
  const double width = law.upper_edge - law.lower_edge;
  const double fraction = std::clamp((lambda - law.lower_edge) / width, 0.0, 1.0);
  return std::asin(std::sqrt(fraction));
}

}  // namespace

QuadratureResult integrate_mp(const MpLaw& law, const std::function<double(double)>& f,
                              const QuadratureOptions& options) {
  return integrate_substituted(law, f, 0.0, 0.5 * std::numbers::pi, options);
}

double mp_interval_mass(const MpLaw& law, double lo, double hi,
                        const QuadratureOptions& options) {
  require(lo <= hi, "mp_interval_mass: empty interval");
  double mass = integrate_substituted(law, [](double) { return 1.0; }, to_angle(law, lo),
                                      to_angle(law, hi), options)
                    .value;
  if (lo <= 0.0 && hi >= 0.0) mass += law.atom_mass;
  return mass;
}

double asymptotic_risk_derivative(double gamma, double theta_norm_sq, double sigma_sq, double t,
                                  const QuadratureOptions& options) {
  require(t >= 0.0, "asymptotic_risk_derivative: t must be nonnegative");
  require(theta_norm_sq >= 0.0 && sigma_sq >= 0.0,
          "asymptotic_risk_derivative: variances must be nonnegative");
  const MpLaw law(gamma);
  const auto integrand = [&](double lambda) {
    const double once = std::exp(-t * lambda);
    const double twice = once * once;
    return -2.0 * theta_norm_sq * lambda * twice + (2.0 / gamma) * sigma_sq * (once - twice);
  };
  return integrate_mp(law, integrand, options).value;
}

SandwichValues sandwich_bounds(double gamma, double theta_norm_sq, double sigma_sq, double t,
                               double lambda) {
  require(t >= 0.0, "sandwich_bounds: t must be nonnegative");
  const MpLaw law(gamma);
  require(law.in_support(lambda), "sandwich_bounds: lambda outside the support");
  const double bias = 2.0 * theta_norm_sq;
  const double x = t * lambda;
  const double g1 = -bias * (1.0 - x) + 2.0 * sigma_sq * (t - 1.5 * t * x);
  const double g2 = -bias + 2.0 * sigma_sq * (t - 0.5 * t * x);
  const double g3 = -bias * (1.0 - x) + 2.0 * sigma_sq * t;
  const double root = std::sqrt(1.0 / gamma);
  const double c1 = 1.0 - t * (1.0 - root) * (1.0 - root);
  const double c2 = 1.0 - t * (1.0 + root) * (1.0 + root);

  SandwichValues out;
  out.lower = std::min({g1, g2, c1 * g3, c2 * g3});
  out.upper = std::max({g3, c1 * g2, c2 * g2, c1 * g3, c2 * g3});
  out.exact = -bias * std::exp(-2.0 * x) + 2.0 * sigma_sq * t * decay_ratio(x);
  return out;
}

IntervalSet interval_set(double gamma, double rho) {
  IntervalSet out;
  out.rho = rho;
  out.decreasing_until = gamma / (gamma + 1.0) * rho / (rho + 1.0);
  const double disc = (1.0 + rho) * (1.0 + rho) - 6.0 * rho;
  out.increasing_from = disc >= 0.0
                            ? 2.0 * gamma / (gamma + 1.0) * rho / (1.0 + rho + std::sqrt(disc))
                            : std::numeric_limits<double>::quiet_NaN();
  const double root = std::sqrt(1.0 / gamma);
  out.increasing_until = 1.0 / ((1.0 + root) * (1.0 + root));
  out.applicable = gamma > 0.25 && gamma < 4.0 && rho < 2.0 - std::sqrt(3.0);
  return out;
}

AsymptoticIntervals asymptotic_intervals(double gamma, double theta_norm_sq, double sigma_sq) {
  require(gamma > 0.0 && std::isfinite(gamma), "asymptotic_intervals: gamma must be positive");
  require(sigma_sq > 0.0, "asymptotic_intervals: sigma_sq must be positive");
  require(theta_norm_sq >= 0.0, "asymptotic_intervals: theta_norm_sq must be nonnegative");
  const double snr = theta_norm_sq / sigma_sq;

  AsymptoticIntervals out;
  out.gamma = gamma;
  out.primary = interval_set(gamma, (gamma + 1.0) * snr);
  out.proof_variant = interval_set(gamma, (gamma + 1.0) / gamma * snr);
  if (gamma <= 0.25) {
    out.edge = {true, "small_gamma", 4.0 * gamma / 9.0 * std::log1p(snr / 4.0),
                4.0 * gamma * std::log1p(9.0 * snr / 4.0)};
  } else if (gamma >= 4.0) {
    out.edge = {true, "large_gamma", 4.0 / 9.0 * std::log1p(snr * gamma / 4.0),
                4.0 * std::log1p(9.0 * snr * gamma / 4.0)};
  } else {
    out.edge = {false, "none", 0.0, 0.0};
  }
  return out;
}

}  // namespace stoplab
