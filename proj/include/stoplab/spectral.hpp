#pragma once

#include <utility>
#include <vector>

#include "stoplab/types.hpp"

namespace stoplab {

// Eigen-decomposition of the empirical second moment (1/n) X^T X.
struct Spectrum {
  // Length d, descending, negative round-off clamped to zero.
  Vector eigenvalues;
  // d x k with k = min(n, d); column i pairs with eigenvalues(i). Columns
  // whose rank_mask entry is false are zero when the Gram path was used.
  // Empty when only eigenvalues were requested.
  Matrix eigenvectors;
  std::vector<bool> rank_mask;
  Index samples = 0;

  [[nodiscard]] Index dimension() const { return eigenvalues.size(); }
  [[nodiscard]] Index rank() const;
  [[nodiscard]] bool has_eigenvectors() const { return eigenvectors.size() > 0; }
  [[nodiscard]] double largest() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
};

enum class SpectrumMode { kValuesAndVectors, kValuesOnly };

// Uses the smaller Gram matrix (1/n) X X^T when n < d and lifts eigenvectors
// through X^T, so the cost is O(min(n,d)^2 max(n,d)).
Spectrum eigen_spectrum(const Matrix& x, SpectrumMode mode = SpectrumMode::kValuesAndVectors);

// Relative threshold below which an eigenvalue counts as zero.
inline constexpr double kRankTolerance = 1e-10;

enum class DataRegime { kWide, kTall };  // n <= d, n > d

// High-probability interval for the nonzero eigenvalues of (1/n) X^T X with
// Gaussian X (singular-value concentration with deviation sqrt(2 log m)).
struct ConcentrationInterval {
  double gamma = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double failure_probability = 0.0;
  DataRegime regime = DataRegime::kWide;
  // gamma <= 1 (wide) or gamma >= 1 (tall).
  bool hypothesis_satisfied = false;
};

ConcentrationInterval concentration_interval(Index n, Index d);

// (E sum lambda_i, E sum lambda_i^2) for the eigenvalues of (1/m) A^T A,
// A an m x big_n standard Gaussian matrix.
std::pair<double, double> wishart_moments(Index m, Index big_n);

// Same expectations with the second moment (N/m)(m + N + 1). The form above
// counts the index pairs with k = l and i = j twice, which overstates the
// second moment by N/m (visible at m = N = 1: E[a^4] = 3, not 4).
std::pair<double, double> exact_wishart_moments(Index m, Index big_n);

}  // namespace stoplab
