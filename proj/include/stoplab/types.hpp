#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace stoplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Precondition violations on caller-supplied arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not deliver its contract (no root, no
// convergence, bound not applicable).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

// Monte Carlo estimate with its standard error.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

}  // namespace stoplab
