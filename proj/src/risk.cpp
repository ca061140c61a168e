#include "stoplab/risk.hpp"

#include <cmath>

#include "stoplab/dynamics.hpp"
#include "stoplab/parallel.hpp"

namespace stoplab {

const char* to_string(Setting setting) {
  return setting == Setting::kOver ? "over" : "under";
}

Setting parse_setting(const std::string& text) {
  if (text == "over") return Setting::kOver;
  if (text == "under") return Setting::kUnder;
  throw InvalidArgument("unknown setting '" + text + "' (expected over or under)");
}

void ModelSpec::validate() const {
  require(n >= 1 && d >= 1 && p >= 1, "ModelSpec: n, d and p must be positive");
  require(setting == Setting::kOver ? p <= d : d <= p,
          setting == Setting::kOver ? "ModelSpec: over setting requires p <= d"
                                    : "ModelSpec: under setting requires d <= p");
  require(theta_norm_sq >= 0.0 && std::isfinite(theta_norm_sq),
          "ModelSpec: theta_norm_sq must be finite and nonnegative");
  require(sigma_sq > 0.0 && std::isfinite(sigma_sq), "ModelSpec: sigma_sq must be positive");
}

Vector ModelSpec::theta_star() const {
  Vector theta = Vector::Zero(p);
  theta(0) = std::sqrt(theta_norm_sq);
  return theta;
}

McEstimate summarize(std::span<const double> values) {
  const auto count = static_cast<double>(values.size());
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (count - 1.0) / count)};
}

double population_risk(const Vector& beta, const SemiOrthogonal& projection,
                       const ModelSpec& spec) {
  spec.validate();
  const Matrix& proj = projection.entries;
  require(proj.rows() == spec.p && proj.cols() == spec.d,
          "population_risk: projection must be p x d");
  require(beta.size() == spec.d, "population_risk: beta must have length d");
  require(projection.orientation == spec.projection_orientation(),
          "population_risk: projection orientation does not match the setting");

  const Vector theta = spec.theta_star();
  const Vector beta_star = proj.transpose() * theta;
  double risk = spec.sigma_sq + (beta - beta_star).squaredNorm();
  if (spec.setting == Setting::kUnder) risk += (theta - proj * beta_star).squaredNorm();
  return risk;
}

namespace {

void check_over(const Spectrum& spectrum, const ModelSpec& spec, double t) {
  spec.validate();
  require(spec.setting == Setting::kOver, "expected over setting");
  require(spectrum.dimension() == spec.d, "spectrum dimension must equal spec.d");
  require(t >= 0.0, "t must be nonnegative");
}

}  // namespace

double expected_risk_over(const Spectrum& spectrum, const ModelSpec& spec, double t) {
  check_over(spectrum, spec, t);
  const double n = static_cast<double>(spec.n);
  double bias = 0.0;
  double variance = 0.0;
  for (Index i = 0; i < spectrum.dimension(); ++i) {
    const double lambda = spectrum.eigenvalues(i);
    bias += std::exp(-2.0 * t * lambda);
    if (spectrum.rank_mask[static_cast<std::size_t>(i)]) {
      const double decay = std::expm1(-t * lambda);
      variance += decay * decay / lambda;
    }
  }
  return spec.sigma_sq + bias * spec.theta_norm_sq / static_cast<double>(spec.d) +
         spec.sigma_sq / n * variance;
}

double risk_derivative_over(const Spectrum& spectrum, const ModelSpec& spec, double t) {
  check_over(spectrum, spec, t);
  const double n = static_cast<double>(spec.n);
  double bias = 0.0;
  double variance = 0.0;
  for (Index i = 0; i < spectrum.dimension(); ++i) {
    const double lambda = spectrum.eigenvalues(i);
    const double once = std::exp(-t * lambda);
    bias += lambda * once * once;
    if (spectrum.rank_mask[static_cast<std::size_t>(i)]) variance += once - once * once;
  }
  return -2.0 * spec.theta_norm_sq / static_cast<double>(spec.d) * bias +
         2.0 * spec.sigma_sq / n * variance;
}

//---------------------------------------------------------------------------//

UnderRiskModel::UnderRiskModel(const ModelSpec& spec, Index trials, const RngStream& stream,
                               int workers)
    : spec_(spec), trials_(trials) {
  spec_.validate();
  require(spec_.setting == Setting::kUnder, "UnderRiskModel: expected under setting");
  require(trials >= 1, "UnderRiskModel: trials must be positive");
  eigenvalues_ = Matrix::Zero(trials, spec_.d);
  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t j) {
    const Index row = static_cast<Index>(j);
    const Matrix x = sample_gaussian_matrix(spec_.n, spec_.d, stream.split(j));
    const Spectrum s = eigen_spectrum(x, SpectrumMode::kValuesOnly);
    for (Index i = 0; i < spec_.d; ++i)
      eigenvalues_(row, i) = s.rank_mask[static_cast<std::size_t>(i)] ? s.eigenvalues(i) : 0.0;
  });
}

McEstimate UnderRiskModel::risk(double t) const {
  require(t >= 0.0, "expected_risk_under: t must be nonnegative");
  const double p = static_cast<double>(spec_.p);
  const double d = static_cast<double>(spec_.d);
  const double n = static_cast<double>(spec_.n);
  const double noise = spec_.sigma_sq + (p - d) / p * spec_.theta_norm_sq;
  std::vector<double> values(static_cast<std::size_t>(trials_));
  for (Index j = 0; j < trials_; ++j) {
    double bias = 0.0;
    double variance = 0.0;
    for (Index i = 0; i < spec_.d; ++i) {
      const double lambda = eigenvalues_(j, i);
      bias += std::exp(-2.0 * t * lambda);
      if (lambda > 0.0) {
        const double decay = std::expm1(-t * lambda);
        variance += decay * decay / lambda;
      }
    }
    values[static_cast<std::size_t>(j)] = bias * spec_.theta_norm_sq / p + noise / n * variance;
  }
  McEstimate out = summarize(values);
  out.estimate += spec_.sigma_sq + (1.0 - d / p) * spec_.theta_norm_sq;
  return out;
}

McEstimate UnderRiskModel::derivative(double t) const {
  require(t >= 0.0, "risk_derivative_under: t must be nonnegative");
  const double p = static_cast<double>(spec_.p);
  const double d = static_cast<double>(spec_.d);
  const double n = static_cast<double>(spec_.n);
  const double noise = spec_.sigma_sq + (p - d) / p * spec_.theta_norm_sq;
  std::vector<double> values(static_cast<std::size_t>(trials_));
  for (Index j = 0; j < trials_; ++j) {
    double bias = 0.0;
    double variance = 0.0;
    for (Index i = 0; i < spec_.d; ++i) {
      const double lambda = eigenvalues_(j, i);
      const double once = std::exp(-t * lambda);
      bias += lambda * once * once;
      variance += once - once * once;
    }
    values[static_cast<std::size_t>(j)] =
        -2.0 * spec_.theta_norm_sq / p * bias + 2.0 / n * noise * variance;
  }
  return summarize(values);
}

McEstimate expected_risk_under(const ModelSpec& spec, double t, Index trials,
                               const RngStream& stream) {
  require(t >= 0.0, "expected_risk_under: t must be nonnegative");
  return UnderRiskModel(spec, trials, stream).risk(t);
}

McEstimate risk_derivative_under(const ModelSpec& spec, double t, Index trials,
                                 const RngStream& stream) {
  require(t >= 0.0, "risk_derivative_under: t must be nonnegative");
  return UnderRiskModel(spec, trials, stream).derivative(t);
}

//---------------------------------------------------------------------------//

namespace {

std::vector<McEstimate> reduce_by_time(const std::vector<std::vector<double>>& per_trial,
                                       std::size_t time_count) {
  std::vector<McEstimate> out;
  out.reserve(time_count);
  std::vector<double> column(per_trial.size());
  for (std::size_t k = 0; k < time_count; ++k) {
    for (std::size_t j = 0; j < per_trial.size(); ++j) column[j] = per_trial[j][k];
    out.push_back(summarize(column));
  }
  return out;
}

void check_oracle_args(std::span<const double> times, Index trials) {
  require(trials >= 2, "mc_risk_oracle: trials must be at least 2");
  for (double t : times) require(t >= 0.0, "mc_risk_oracle: times must be nonnegative");
}

// Scores one simulated training set at every requested time.
std::vector<double> score_trial(const Matrix& x, const Spectrum& spectrum, const Vector& y,
                                const SemiOrthogonal& projection, const ModelSpec& spec,
                                std::span<const double> times) {
  const GradientFlow flow(spectrum, x, y);
  std::vector<double> risks;
  risks.reserve(times.size());
  for (double t : times) risks.push_back(population_risk(flow.beta(t), projection, spec));
  return risks;
}

}  // namespace

std::vector<McEstimate> mc_risk_oracle_over(const Matrix& x, const ModelSpec& spec,
                                            std::span<const double> times, Index trials,
                                            const RngStream& stream, int workers) {
  spec.validate();
  require(spec.setting == Setting::kOver, "mc_risk_oracle_over: expected over setting");
  require(x.rows() == spec.n && x.cols() == spec.d, "mc_risk_oracle_over: X must be n x d");
  check_oracle_args(times, trials);

  const Spectrum spectrum = eigen_spectrum(x);
  const Vector theta = spec.theta_star();
  const double noise_sd = std::sqrt(spec.sigma_sq);
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), workers, [&](std::size_t j) {
    CounterRng rng(stream.split(j));
    const SemiOrthogonal proj =
        sample_haar_semi_orthogonal(spec.p, spec.d, Orientation::kRowOrthonormal, rng);
    const Vector y = x * (proj.entries.transpose() * theta) +
                     sample_gaussian_vector(spec.n, noise_sd, rng);
    per_trial[j] = score_trial(x, spectrum, y, proj, spec, times);
  });
  return reduce_by_time(per_trial, times.size());
}

McEstimate mc_risk_oracle_over(const Matrix& x, const ModelSpec& spec, double t, Index trials,
                               const RngStream& stream) {
  const double times[] = {t};
  return mc_risk_oracle_over(x, spec, times, trials, stream).front();
}

std::vector<McEstimate> mc_risk_oracle_under(const ModelSpec& spec,
                                             std::span<const double> times, Index trials,
                                             const RngStream& stream, int workers) {
  spec.validate();
  require(spec.setting == Setting::kUnder, "mc_risk_oracle_under: expected under setting");
  check_oracle_args(times, trials);

  const Vector theta = spec.theta_star();
  const double noise_sd = std::sqrt(spec.sigma_sq);
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), workers, [&](std::size_t j) {
    CounterRng rng(stream.split(j));
    const Matrix z = sample_gaussian_matrix(spec.n, spec.p, rng);
    const SemiOrthogonal proj =
        sample_haar_semi_orthogonal(spec.p, spec.d, Orientation::kColumnOrthonormal, rng);
    const Vector y = z * theta + sample_gaussian_vector(spec.n, noise_sd, rng);
    const Matrix x = z * proj.entries;
    per_trial[j] = score_trial(x, eigen_spectrum(x), y, proj, spec, times);
  });
  return reduce_by_time(per_trial, times.size());
}

McEstimate mc_risk_oracle_under(const ModelSpec& spec, double t, Index trials,
                                const RngStream& stream) {
  const double times[] = {t};
  return mc_risk_oracle_under(spec, times, trials, stream).front();
}

std::vector<McEstimate> mc_average_risk_over(const ModelSpec& spec,
                                             std::span<const double> times, Index trials,
                                             const RngStream& stream, int workers) {
  spec.validate();
  require(spec.setting == Setting::kOver, "mc_average_risk_over: expected over setting");
  check_oracle_args(times, trials);

  const Vector theta = spec.theta_star();
  const double noise_sd = std::sqrt(spec.sigma_sq);
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), workers, [&](std::size_t j) {
    CounterRng rng(stream.split(j));
    const Matrix x = sample_gaussian_matrix(spec.n, spec.d, rng);
    const SemiOrthogonal proj =
        sample_haar_semi_orthogonal(spec.p, spec.d, Orientation::kRowOrthonormal, rng);
    const Vector y = x * (proj.entries.transpose() * theta) +
                     sample_gaussian_vector(spec.n, noise_sd, rng);
    per_trial[j] = score_trial(x, eigen_spectrum(x), y, proj, spec, times);
  });
  return reduce_by_time(per_trial, times.size());
}

}  // namespace stoplab
