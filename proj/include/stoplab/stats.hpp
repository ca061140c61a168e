#pragma once

#include <span>

#include "stoplab/types.hpp"

namespace stoplab {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;  // asymptotic Kolmogorov distribution
};

// Two-sample Kolmogorov-Smirnov test (inputs are copied and sorted).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

// |a - b| in units of the combined standard error sqrt(se_a^2 + se_b^2).
// Returns 0 when both estimates agree exactly and +inf when they differ with
// zero combined error.
double z_distance(const McEstimate& a, const McEstimate& b);

}  // namespace stoplab
