#pragma once

#include "stoplab/rng.hpp"
#include "stoplab/types.hpp"

namespace stoplab {

enum class Orientation {
  kRowOrthonormal,     // P P^T = I_p, requires p <= d
  kColumnOrthonormal,  // P^T P = I_d, requires d <= p
};

// A p x d matrix with orthonormal rows or columns.
struct SemiOrthogonal {
  Matrix entries;
  Orientation orientation = Orientation::kRowOrthonormal;

  // max |P P^T - I| (rows) or max |P^T P - I| (columns).
  [[nodiscard]] double orthonormality_residual() const;
};

// n x d matrix of iid N(0, 1) entries, filled row by row.
Matrix sample_gaussian_matrix(Index n, Index d, CounterRng& rng);
Matrix sample_gaussian_matrix(Index n, Index d, const RngStream& stream);

Vector sample_gaussian_vector(Index n, double std_dev, CounterRng& rng);

// Haar-distributed semi-orthogonal matrix: thin QR of a Gaussian matrix with
// column j of Q multiplied by sign(R_jj), sign(0) := +1.
SemiOrthogonal sample_haar_semi_orthogonal(Index p, Index d, Orientation orientation,
                                           CounterRng& rng);
SemiOrthogonal sample_haar_semi_orthogonal(Index p, Index d, Orientation orientation,
                                           const RngStream& stream);

}  // namespace stoplab
