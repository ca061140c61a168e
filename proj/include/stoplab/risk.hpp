#pragma once

#include <span>
#include <vector>

#include "stoplab/rng.hpp"
#include "stoplab/sampling.hpp"
#include "stoplab/spectral.hpp"
#include "stoplab/types.hpp"

namespace stoplab {

enum class Setting {
  kOver,   // labels depend on P x with P p x d row-orthonormal, p <= d
  kUnder,  // model sees X = Z P with P p x d column-orthonormal, d <= p
};

const char* to_string(Setting setting);
Setting parse_setting(const std::string& text);

struct ModelSpec {
  Setting setting = Setting::kOver;
  Index n = 1;
  Index d = 1;
  Index p = 1;
  double theta_norm_sq = 1.0;
  double sigma_sq = 1.0;

  void validate() const;
  // ||theta*|| e_1 in R^p. Formulas depend on theta* only through its norm.
  [[nodiscard]] Vector theta_star() const;
  [[nodiscard]] Orientation projection_orientation() const {
    return setting == Setting::kOver ? Orientation::kRowOrthonormal
                                     : Orientation::kColumnOrthonormal;
  }
};

// over:  sigma^2 + ||beta - P^T theta*||^2
// under: sigma^2 + ||theta* - P P^T theta*||^2 + ||beta - P^T theta*||^2
double population_risk(const Vector& beta, const SemiOrthogonal& projection,
                       const ModelSpec& spec);

// Risk of the gradient-flow iterate averaged over Haar P and label noise,
// with X (through its spectrum) held fixed. Zero eigenvalues keep their
// bias contribution ||theta*||^2/d and drop out of the variance sum.
double expected_risk_over(const Spectrum& spectrum, const ModelSpec& spec, double t);
double risk_derivative_over(const Spectrum& spectrum, const ModelSpec& spec, double t);

//---------------------------------------------------------------------------//
/*!
 * Expected risk in the under setting.
 *
 * The deterministic part sigma^2 + (1 - d/p)||theta*||^2 is exact; the two
 * expectations over the eigenvalue law of (1/n) X^T X (X an n x d Gaussian
 * matrix) are averaged over `trials` sampled spectra. Spectra are drawn once
 * at construction and reused for every t (common random numbers), so risk
 * and derivative curves are smooth and the derivative is the exact
 * derivative of the risk estimate.
 */
class UnderRiskModel {
 public:
  UnderRiskModel(const ModelSpec& spec, Index trials, const RngStream& stream, int workers = 1);

  [[nodiscard]] McEstimate risk(double t) const;
  [[nodiscard]] McEstimate derivative(double t) const;

  [[nodiscard]] const ModelSpec& spec() const { return spec_; }
  [[nodiscard]] Index trials() const { return trials_; }
  // Row j holds the eigenvalues of spectrum j; masked-out entries are zero.
  [[nodiscard]] const Matrix& eigenvalues() const { return eigenvalues_; }

 private:
  ModelSpec spec_;
  Index trials_;
  Matrix eigenvalues_;  // trials x d
};

McEstimate expected_risk_under(const ModelSpec& spec, double t, Index trials,
                               const RngStream& stream);
McEstimate risk_derivative_under(const ModelSpec& spec, double t, Index trials,
                                 const RngStream& stream);

// Independent simulation path. Over: X fixed, each trial draws a fresh Haar P
// and noise, runs the closed-form flow and scores population_risk. One
// estimate per requested time; trials are shared across times.
std::vector<McEstimate> mc_risk_oracle_over(const Matrix& x, const ModelSpec& spec,
                                            std::span<const double> times, Index trials,
                                            const RngStream& stream, int workers = 1);
McEstimate mc_risk_oracle_over(const Matrix& x, const ModelSpec& spec, double t, Index trials,
                               const RngStream& stream);

// Under: each trial draws Z, P and noise and trains on X = Z P.
std::vector<McEstimate> mc_risk_oracle_under(const ModelSpec& spec,
                                             std::span<const double> times, Index trials,
                                             const RngStream& stream, int workers = 1);
McEstimate mc_risk_oracle_under(const ModelSpec& spec, double t, Index trials,
                                const RngStream& stream);

// Over setting with the design X also resampled per trial: estimates
// E_X[expected risk], the quantity bounded by the sample-size monotonicity result.
std::vector<McEstimate> mc_average_risk_over(const ModelSpec& spec,
                                             std::span<const double> times, Index trials,
                                             const RngStream& stream, int workers = 1);

// Mean and standard error of a sample (standard error 0 for one value).
McEstimate summarize(std::span<const double> values);

}  // namespace stoplab
