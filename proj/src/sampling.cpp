#include "stoplab/sampling.hpp"

#include <Eigen/QR>

namespace stoplab {

double SemiOrthogonal::orthonormality_residual() const {
  const Matrix gram = orientation == Orientation::kRowOrthonormal
                          ? Matrix(entries * entries.transpose())
                          : Matrix(entries.transpose() * entries);
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Matrix sample_gaussian_matrix(Index n, Index d, CounterRng& rng) {
  require(n >= 1 && d >= 1, "sample_gaussian_matrix: n and d must be positive");
  Matrix out(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = rng.normal();
  return out;
}

Matrix sample_gaussian_matrix(Index n, Index d, const RngStream& stream) {
  CounterRng rng(stream);
  return sample_gaussian_matrix(n, d, rng);
}

Vector sample_gaussian_vector(Index n, double std_dev, CounterRng& rng) {
  require(n >= 1, "sample_gaussian_vector: n must be positive");
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = std_dev * rng.normal();
  return out;
}

SemiOrthogonal sample_haar_semi_orthogonal(Index p, Index d, Orientation orientation,
                                           CounterRng& rng) {
  require(p >= 1 && d >= 1, "sample_haar_semi_orthogonal: p and d must be positive");
  const bool rows = orientation == Orientation::kRowOrthonormal;
  require(rows ? p <= d : d <= p,
          rows ? "sample_haar_semi_orthogonal: row-orthonormal requires p <= d"
               : "sample_haar_semi_orthogonal: column-orthonormal requires d <= p");

  // Tall Gaussian block whose thin Q gives the orthonormal frame.
  const Index tall = rows ? d : p;
  const Index thin = rows ? p : d;
  const Matrix gaussian = sample_gaussian_matrix(tall, thin, rng);
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(tall, thin);
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < thin; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;

  SemiOrthogonal out;
  out.orientation = orientation;
  out.entries = rows ? Matrix(q.transpose()) : q;
  return out;
}

SemiOrthogonal sample_haar_semi_orthogonal(Index p, Index d, Orientation orientation,
                                           const RngStream& stream) {
  CounterRng rng(stream);
  return sample_haar_semi_orthogonal(p, d, orientation, rng);
}

}  // namespace stoplab
