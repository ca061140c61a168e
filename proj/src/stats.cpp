#include "stoplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stoplab {

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges slowly; the value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: samples must be nonempty");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double stat = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    stat = std::max(stat, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double root = std::sqrt(ne);
  KsResult out;
  out.statistic = stat;
  out.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * stat);
  return out;
}

double z_distance(const McEstimate& a, const McEstimate& b) {
  const double diff = std::abs(a.estimate - b.estimate);
  const double se = std::hypot(a.std_error, b.std_error);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

}  // namespace stoplab
