#include "stoplab/stopping.hpp"

#include <cmath>
#include <sstream>

#include "stoplab/parallel.hpp"

namespace stoplab {

StoppingResult find_topt(const std::function<double(double)>& derivative, double t_scale,
                         const StoppingSearchOptions& options) {
  require(t_scale > 0.0 && std::isfinite(t_scale), "find_topt: t_scale must be positive");
  require(options.grid_points >= 2, "find_topt: grid needs at least two points");

  StoppingResult out;
  auto eval = [&](double t) {
    ++out.evaluations;
    const double value = derivative(t);
    if (std::isnan(value)) throw NumericalError("find_topt: derivative returned NaN");
    return value;
  };

  double negative_t = options.probe * t_scale;
  if (!(eval(negative_t) < 0.0))
    throw DegenerateInstance("find_topt: derivative is not negative near t = 0");

  const double lo = options.grid_lower * t_scale;
  const double ratio = std::pow(options.grid_upper / options.grid_lower,
                                1.0 / static_cast<double>(options.grid_points - 1));
  double positive_t = -1.0;
  // An exact zero is not a sign change: a derivative that is negative
  // forever (noiseless labels) underflows to 0 on the far grid points.
  for (int k = 0; k < options.grid_points; ++k) {
    const double t = lo * std::pow(ratio, static_cast<double>(k));
    const double value = eval(t);
    if (value > 0.0) {
      positive_t = t;
      break;
    }
    if (value < 0.0) negative_t = t;
  }
  if (positive_t < 0.0)
    throw NoInteriorOptimum("find_topt: no interior optimum in the search range");

  while (positive_t - negative_t > options.relative_width * positive_t) {
    const double mid = 0.5 * (negative_t + positive_t);
    if (eval(mid) < 0.0)
      negative_t = mid;
    else
      positive_t = mid;
  }
  out.bracket_lower = negative_t;
  out.bracket_upper = positive_t;
  out.t_opt = 0.5 * (negative_t + positive_t);
  out.derivative_at_t_opt = eval(out.t_opt);
  return out;
}

double default_t_scale(const ModelSpec& spec) {
  const double n = static_cast<double>(spec.n);
  const double d = static_cast<double>(spec.d);
  if (spec.setting == Setting::kOver) return n / (n + d);
  const double p = static_cast<double>(spec.p);
  const double scale =
      n * spec.theta_norm_sq / (p * spec.sigma_sq + (p - d) * spec.theta_norm_sq);
  // ||theta||^2 = 0 collapses the scale; fall back to the over-style guess.
  return scale > 0.0 ? scale : n / (n + d);
}

StoppingResult find_topt_over(const Spectrum& spectrum, const ModelSpec& spec) {
  return find_topt([&](double t) { return risk_derivative_over(spectrum, spec, t); },
                   default_t_scale(spec));
}

StoppingResult find_topt_under(const UnderRiskModel& model) {
  return find_topt([&](double t) { return model.derivative(t).estimate; },
                   default_t_scale(model.spec()));
}

BoundInterval theorem1_bounds(const ModelSpec& spec) {
  spec.validate();
  require(spec.setting == Setting::kOver, "theorem1_bounds: expected over setting");
  require(spec.n >= 2 && spec.d >= 2, "theorem1_bounds: n and d must be at least 2");
  const double n = static_cast<double>(spec.n);
  const double d = static_cast<double>(spec.d);
  const double snr = spec.theta_norm_sq / spec.sigma_sq;

  BoundInterval out;
  std::ostringstream note;
  if (spec.n <= spec.d) {
    const double root = (std::sqrt(n) + std::sqrt(2.0 * std::log(n))) / std::sqrt(d);
    out.gamma = root * root;
    const double lo_sq = (1.0 - root) * (1.0 - root);
    const double hi_sq = (1.0 + root) * (1.0 + root);
    out.lower = n / (hi_sq * d) * std::log1p(lo_sq * snr);
    out.upper = n / (lo_sq * d) * std::log1p(hi_sq * snr);
    out.hypothesis_satisfied = out.gamma <= 1.0;
    note << "n <= d, gamma = " << out.gamma << (out.hypothesis_satisfied ? " <= 1" : " > 1");
  } else {
    const double root = std::sqrt(n) / (std::sqrt(d) + std::sqrt(2.0 * std::log(d)));
    out.gamma = root * root;
    const double inv = 1.0 / root;
    const double lo_sq = (1.0 - inv) * (1.0 - inv);
    const double hi_sq = (1.0 + inv) * (1.0 + inv);
    out.lower = std::log1p(lo_sq * n / d * snr) / hi_sq;
    out.upper = std::log1p(hi_sq * n / d * snr) / lo_sq;
    out.hypothesis_satisfied = out.gamma >= 1.0;
    note << "n > d, gamma = " << out.gamma << (out.hypothesis_satisfied ? " >= 1" : " < 1");
  }
  out.hypothesis_note = note.str();
  return out;
}

BoundInterval theorem2_bounds(const ModelSpec& spec) {
  spec.validate();
  require(spec.setting == Setting::kUnder, "theorem2_bounds: expected under setting");
  const double n = static_cast<double>(spec.n);
  const double d = static_cast<double>(spec.d);
  const double p = static_cast<double>(spec.p);
  const double theta = spec.theta_norm_sq;
  const double denom = p * spec.sigma_sq + (p - d) * theta;

  BoundInterval out;
  out.lower = n * theta / (2.0 * denom);
  out.upper = 2.0 * n * theta / denom;
  const double lhs = (8.0 * n + 9.0 * d + 16.0) * theta;
  const double rhs = p * (spec.sigma_sq + theta);
  out.hypothesis_satisfied = lhs <= rhs;
  std::ostringstream note;
  note << "(8n + 9d + 16)|theta|^2 = " << lhs << (out.hypothesis_satisfied ? " <= " : " > ")
       << "p(sigma^2 + |theta|^2) = " << rhs;
  out.hypothesis_note = note.str();
  return out;
}

Prop1Bounds prop1_risk_bounds(double alpha, const ModelSpec& spec, Index trials,
                              const RngStream& stream, int workers) {
  spec.validate();
  require(spec.setting == Setting::kOver, "prop1_risk_bounds: expected over setting");
  require(alpha >= 0.0, "prop1_risk_bounds: alpha must be nonnegative");
  require(trials >= 1, "prop1_risk_bounds: trials must be positive");
  const double n = static_cast<double>(spec.n);
  const double d = static_cast<double>(spec.d);

  Prop1Bounds out;
  out.t_bar = alpha * n / (n + d);
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(values.size(), workers, [&](std::size_t j) {
    const Spectrum s =
        eigen_spectrum(sample_gaussian_matrix(spec.n, spec.d, stream.split(j)),
                       SpectrumMode::kValuesOnly);
    double sum = 0.0;
    for (Index i = 0; i < s.dimension(); ++i) sum += std::exp(-2.0 * out.t_bar * s.eigenvalues(i));
    values[j] = sum * spec.theta_norm_sq / d;
  });
  out.lower = summarize(values);
  out.lower.estimate += spec.sigma_sq;
  out.upper = out.lower;
  out.upper.estimate += 0.5 * alpha * spec.sigma_sq;
  return out;
}

Prop2Bounds prop2_risk_bounds(const ModelSpec& spec) {
  spec.validate();
  require(spec.setting == Setting::kUnder, "prop2_risk_bounds: expected under setting");
  const double n = static_cast<double>(spec.n);
  const double d = static_cast<double>(spec.d);
  const double p = static_cast<double>(spec.p);
  const double theta = spec.theta_norm_sq;
  const double denom = p * p * spec.sigma_sq + p * (p - d) * theta;

  Prop2Bounds out;
  out.t_bar = n * theta / (p * spec.sigma_sq + (p - d) * theta);
  const double base = spec.sigma_sq + theta;
  out.lower = base - 2.0 * n * d * theta * theta / denom;
  out.upper = base - 0.75 * n * d * theta * theta / denom;
  out.ratio_ok = out.lower >= 0.8 * out.upper;
  out.hypothesis_satisfied = theorem2_bounds(spec).hypothesis_satisfied;
  return out;
}

}  // namespace stoplab
