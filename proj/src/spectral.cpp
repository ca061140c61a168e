#include "stoplab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace stoplab {

Index Spectrum::rank() const {
  return static_cast<Index>(std::count(rank_mask.begin(), rank_mask.end(), true));
}

Spectrum eigen_spectrum(const Matrix& x, SpectrumMode mode) {
  require(x.rows() >= 1 && x.cols() >= 1, "eigen_spectrum: empty matrix");
  require(x.allFinite(), "eigen_spectrum: non-finite entries");

  const Index n = x.rows();
  const Index d = x.cols();
  const bool vectors = mode == SpectrumMode::kValuesAndVectors;
  const bool gram_path = n < d;
  const Index k = std::min(n, d);

  const Matrix small = gram_path ? Matrix((x * x.transpose()) / static_cast<double>(n))
                                 : Matrix((x.transpose() * x) / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      small, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen_spectrum: eigensolver failed");

  Spectrum out;
  out.samples = n;
  out.eigenvalues = Vector::Zero(d);
  // Solver order is ascending; reverse into descending.
  for (Index i = 0; i < k; ++i)
    out.eigenvalues(i) = std::max(0.0, solver.eigenvalues()(k - 1 - i));

  const double threshold = kRankTolerance * std::max(1.0, out.eigenvalues(0));
  out.rank_mask.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i)
    out.rank_mask[static_cast<std::size_t>(i)] = out.eigenvalues(i) > threshold;

  if (vectors) {
    const Matrix& basis = solver.eigenvectors();
    out.eigenvectors = Matrix::Zero(d, k);
    for (Index i = 0; i < k; ++i) {
      const Index src = k - 1 - i;
      if (!gram_path) {
        out.eigenvectors.col(i) = basis.col(src);
      } else if (out.rank_mask[static_cast<std::size_t>(i)]) {
        // v = X^T u / sqrt(n mu) is a unit eigenvector of (1/n) X^T X.
        out.eigenvectors.col(i) =
            x.transpose() * basis.col(src) /
            std::sqrt(static_cast<double>(n) * out.eigenvalues(i));
      }
    }
  }
  return out;
}

ConcentrationInterval concentration_interval(Index n, Index d) {
  require(n >= 2 && d >= 2, "concentration_interval: n and d must be at least 2");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  ConcentrationInterval out;
  if (n <= d) {
    const double root = (std::sqrt(nn) + std::sqrt(2.0 * std::log(nn))) / std::sqrt(dd);
    out.gamma = root * root;
    out.lower = (dd / nn) * (1.0 - root) * (1.0 - root);
    out.upper = (dd / nn) * (1.0 + root) * (1.0 + root);
    out.failure_probability = 2.0 / nn;
    out.regime = DataRegime::kWide;
    out.hypothesis_satisfied = out.gamma <= 1.0;
  } else {
    const double root = std::sqrt(nn) / (std::sqrt(dd) + std::sqrt(2.0 * std::log(dd)));
    out.gamma = root * root;
    const double inv = 1.0 / root;
    out.lower = (1.0 - inv) * (1.0 - inv);
    out.upper = (1.0 + inv) * (1.0 + inv);
    out.failure_probability = 2.0 / dd;
    out.regime = DataRegime::kTall;
    out.hypothesis_satisfied = out.gamma >= 1.0;
  }
  return out;
}

std::pair<double, double> wishart_moments(Index m, Index big_n) {
  require(m >= 1 && big_n >= 1, "wishart_moments: m and N must be positive");
  const double mm = static_cast<double>(m);
  const double nn = static_cast<double>(big_n);
  return {nn, (nn / mm) * (mm + nn + 2.0)};
}

std::pair<double, double> exact_wishart_moments(Index m, Index big_n) {
  require(m >= 1 && big_n >= 1, "exact_wishart_moments: m and N must be positive");
  const double mm = static_cast<double>(m);
  const double nn = static_cast<double>(big_n);
  return {nn, (nn / mm) * (mm + nn + 1.0)};
}

}  // namespace stoplab
