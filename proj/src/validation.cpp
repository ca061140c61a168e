#include "stoplab/validation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "stoplab/asymptotics.hpp"
#include "stoplab/dynamics.hpp"
#include "stoplab/parallel.hpp"
#include "stoplab/sampling.hpp"
#include "stoplab/spectral.hpp"
#include "stoplab/stats.hpp"
#include "stoplab/stopping.hpp"

namespace stoplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
  std::uint64_t seed = 1;
  int workers = 1;

  [[nodiscard]] RngStream stream(std::uint64_t tag) const { return RngStream{seed, tag}; }
};

struct Measurement {
  double measured = 0.0;
  std::string detail;
};

struct CheckSpec {
  const char* name;
  const char* module;
  const char* description;
  double threshold;
  Comparison comparison;
  std::function<Measurement(const Context&)> run;
};

template <class... Args>
std::string describe(const Args&... args) {
  std::ostringstream out;
  out.precision(6);
  (out << ... << args);
  return out.str();
}

ModelSpec over_spec(Index n, Index d, Index p, double theta = 1.0, double sigma = 1.0) {
  ModelSpec s;
  s.setting = Setting::kOver;
  s.n = n;
  s.d = d;
  s.p = p;
  s.theta_norm_sq = theta;
  s.sigma_sq = sigma;
  return s;
}

ModelSpec under_spec(Index n, Index d, Index p, double theta = 1.0, double sigma = 1.0) {
  ModelSpec s = over_spec(n, d, p, theta, sigma);
  s.setting = Setting::kUnder;
  return s;
}

template <class F>
int count_throws(F&& f) {
  try {
    f();
  } catch (const std::exception&) {
    return 1;
  }
  return 0;
}

//---------------------------------------------------------------------------//
// sampling

Measurement stream_determinism(const Context& c) {
  int mismatches = 0;
  for (std::uint64_t k = 0; k < 8; ++k) {
    const RngStream s = c.stream(100).split(k);
    if (sample_gaussian_matrix(3, 5, s) != sample_gaussian_matrix(3, 5, s)) ++mismatches;
    if (s.split(3) != s.split(3)) ++mismatches;
    CounterRng a(s);
    CounterRng b(s);
    for (int i = 0; i < 1000; ++i)
      if (a.next_u64() != b.next_u64()) ++mismatches;
  }
  return {static_cast<double>(mismatches), describe(mismatches, " mismatching draws")};
}

Measurement stream_independence(const Context& c) {
  constexpr int kDraws = 10000;
  double worst = 0.0;
  auto correlation_z = [&](RngStream a, RngStream b) {
    CounterRng ra(a);
    CounterRng rb(b);
    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < kDraws; ++i) {
      const double x = ra.normal();
      const double y = rb.normal();
      sx += x;
      sy += y;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double n = kDraws;
    const double cov = sxy / n - sx / n * sy / n;
    const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    return std::abs(r) * std::sqrt(n);
  };
  for (std::uint64_t k = 0; k < 10; ++k) {
    worst = std::max(worst, correlation_z(c.stream(200).split(k), c.stream(200).split(k + 1)));
    worst = std::max(worst, correlation_z(RngStream{c.seed + k, 7}, RngStream{c.seed + k + 1, 7}));
  }
  return {worst, describe("largest |correlation| * sqrt(N) over 20 stream pairs: ", worst)};
}

Measurement data_matrix_finite(const Context& c) {
  int bad = 0;
  const std::pair<Index, Index> shapes[] = {{1, 1}, {3, 7}, {40, 20}, {200, 5}};
  for (std::size_t k = 0; k < std::size(shapes); ++k) {
    const auto [n, d] = shapes[k];
    const Matrix x = sample_gaussian_matrix(n, d, c.stream(300).split(k));
    if (x.rows() != n || x.cols() != d || !x.allFinite()) ++bad;
  }
  bad += 1 - count_throws([&] { sample_gaussian_matrix(0, 3, c.stream(301)); });
  bad += 1 - count_throws([&] { sample_gaussian_matrix(3, 0, c.stream(301)); });
  return {static_cast<double>(bad), describe(bad, " violations (shape, finiteness, rejection)")};
}

Measurement orthonormality(const Context& c) {
  double worst = 0.0;
  const std::pair<Index, Index> shapes[] = {{1, 1}, {2, 6}, {10, 100}, {20, 20}, {40, 300}};
  std::uint64_t k = 0;
  for (const auto& [small, large] : shapes) {
    for (int rep = 0; rep < 5; ++rep) {
      worst = std::max(worst, sample_haar_semi_orthogonal(small, large, Orientation::kRowOrthonormal,
                                                          c.stream(400).split(k++))
                                  .orthonormality_residual());
      worst = std::max(worst, sample_haar_semi_orthogonal(large, small,
                                                          Orientation::kColumnOrthonormal,
                                                          c.stream(400).split(k++))
                                  .orthonormality_residual());
    }
  }
  return {worst, describe("max residual over ", k, " draws: ", worst)};
}

Measurement parallel_generation(const Context& c) {
  constexpr std::size_t kCount = 16;
  std::vector<Matrix> serial(kCount);
  std::vector<Matrix> parallel(kCount);
  for (std::size_t k = 0; k < kCount; ++k)
    serial[k] = sample_gaussian_matrix(17, 9, c.stream(500).split(k));
  parallel_for(kCount, std::max(4, c.workers), [&](std::size_t k) {
    parallel[k] = sample_gaussian_matrix(17, 9, c.stream(500).split(k));
  });
  int mismatches = 0;
  for (std::size_t k = 0; k < kCount; ++k)
    if (serial[k] != parallel[k]) ++mismatches;
  return {static_cast<double>(mismatches), describe(mismatches, " of ", kCount, " streams differ")};
}

Measurement rotational_invariance(const Context& c) {
  constexpr Index kP = 2;
  constexpr Index kD = 6;
  constexpr std::size_t kDraws = 10000;
  const Matrix rotation =
      sample_haar_semi_orthogonal(kD, kD, Orientation::kRowOrthonormal, c.stream(600)).entries;
  Vector theta = Vector::Zero(kP);
  theta(0) = 1.0;
  std::vector<double> plain(kDraws);
  std::vector<double> rotated(kDraws);
  for (std::size_t k = 0; k < kDraws; ++k) {
    const Matrix p1 = sample_haar_semi_orthogonal(kP, kD, Orientation::kRowOrthonormal,
                                                  c.stream(601).split(k))
                          .entries;
    const Matrix p2 = sample_haar_semi_orthogonal(kP, kD, Orientation::kRowOrthonormal,
                                                  c.stream(602).split(k))
                          .entries;
    plain[k] = (p1.transpose() * theta)(0);
    rotated[k] = (rotation * (p2.transpose() * theta))(0);
  }
  const KsResult ks = ks_two_sample(plain, rotated);
  return {ks.p_value, describe("KS statistic ", ks.statistic, ", p-value ", ks.p_value)};
}

//---------------------------------------------------------------------------//
// spectral

std::vector<Matrix> spectral_instances(const Context& c) {
  std::vector<Matrix> out;
  const std::pair<Index, Index> shapes[] = {{30, 50}, {50, 30}, {1, 3}, {25, 25}, {80, 10}, {10, 80}};
  std::uint64_t k = 0;
  for (const auto& [n, d] : shapes) out.push_back(sample_gaussian_matrix(n, d, c.stream(700).split(k++)));
  // Rank-deficient: duplicated columns and a zero row.
  Matrix x = sample_gaussian_matrix(20, 6, c.stream(701));
  x.col(5) = x.col(0);
  x.row(3).setZero();
  out.push_back(x);
  out.push_back(Matrix::Zero(4, 3));
  return out;
}

Measurement eigenvalues_nonnegative(const Context& c) {
  int bad = 0;
  for (const Matrix& x : spectral_instances(c)) {
    const Spectrum s = eigen_spectrum(x);
    for (Index i = 0; i < s.dimension(); ++i) {
      if (!(s.eigenvalues(i) >= 0.0)) ++bad;
      if (i > 0 && s.eigenvalues(i) > s.eigenvalues(i - 1)) ++bad;
    }
  }
  return {static_cast<double>(bad), describe(bad, " negative or out-of-order eigenvalues")};
}

Measurement rank_count(const Context& c) {
  int bad = 0;
  for (const Matrix& x : spectral_instances(c)) {
    const Spectrum s = eigen_spectrum(x);
    if (s.rank() > std::min(x.rows(), x.cols())) ++bad;
  }
  // Generic Gaussian matrices have full rank min(n, d).
  for (std::uint64_t k = 0; k < 5; ++k) {
    const Matrix x = sample_gaussian_matrix(30, 50, c.stream(702).split(k));
    if (eigen_spectrum(x).rank() != 30) ++bad;
  }
  return {static_cast<double>(bad), describe(bad, " rank-count violations")};
}

Measurement reconstruction(const Context& c) {
  double worst = 0.0;
  for (const Matrix& x : spectral_instances(c)) {
    const Spectrum s = eigen_spectrum(x);
    const Index k = s.eigenvectors.cols();
    const Matrix second = x.transpose() * x / static_cast<double>(x.rows());
    const Matrix rebuilt =
        s.eigenvectors * s.eigenvalues.head(k).asDiagonal() * s.eigenvectors.transpose();
    worst = std::max(worst, (second - rebuilt).cwiseAbs().maxCoeff() / std::max(1.0, s.largest()));
  }
  return {worst, describe("max scaled reconstruction error ", worst)};
}

Measurement concentration_ordering(const Context&) {
  int bad = 0;
  for (Index n : {2, 5, 30, 100, 1000, 10000})
    for (Index d : {2, 5, 30, 100, 1000, 10000}) {
      const ConcentrationInterval iv = concentration_interval(n, d);
      if (!(iv.lower <= iv.upper) || !(iv.lower >= 0.0)) ++bad;
    }
  return {static_cast<double>(bad), describe(bad, " intervals with lower > upper or lower < 0")};
}

Measurement trace_identity(const Context& c) {
  double worst = 0.0;
  for (const Matrix& x : spectral_instances(c)) {
    const double direct = x.squaredNorm() / static_cast<double>(x.rows());
    const double sum = eigen_spectrum(x, SpectrumMode::kValuesOnly).eigenvalues.sum();
    if (direct > 0.0) worst = std::max(worst, std::abs(sum - direct) / direct);
  }
  return {worst, describe("max relative trace error ", worst)};
}

Measurement concentration_coverage(const Context& c) {
  constexpr Index kN = 100;
  constexpr Index kD = 10000;
  constexpr std::size_t kSeeds = 50;
  const ConcentrationInterval iv = concentration_interval(kN, kD);
  std::vector<int> inside(kSeeds, 0);
  parallel_for(kSeeds, c.workers, [&](std::size_t k) {
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(kN, kD, c.stream(800).split(k)),
                                      SpectrumMode::kValuesOnly);
    bool ok = true;
    for (Index i = 0; i < s.dimension(); ++i)
      if (s.rank_mask[static_cast<std::size_t>(i)] &&
          (s.eigenvalues(i) < iv.lower || s.eigenvalues(i) > iv.upper))
        ok = false;
    inside[k] = ok ? 1 : 0;
  });
  int count = 0;
  for (int v : inside) count += v;
  return {static_cast<double>(count),
          describe(count, " of ", kSeeds, " spectra inside [", iv.lower, ", ", iv.upper, "]")};
}

Measurement interlacing(const Context& c) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    CounterRng rng(c.stream(900).split(k));
    const Index n = 1 + static_cast<Index>(rng.uniform() * 29.0);
    const Index d = 1 + static_cast<Index>(rng.uniform() * 29.0);
    const Matrix x = sample_gaussian_matrix(n, d, rng);
    const Vector z = sample_gaussian_vector(d, 1.0, rng);
    auto descending = [](const Matrix& m) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
      Vector v = solver.eigenvalues().reverse();
      return v;
    };
    const Matrix old_gram = x.transpose() * x;
    const Vector before = descending(old_gram);
    const Vector after = descending(old_gram + z * z.transpose());
    for (Index i = 0; i < d; ++i) {
      worst = std::max(worst, before(i) - after(i));
      if (i > 0) worst = std::max(worst, after(i) - before(i - 1));
    }
  }
  return {std::max(worst, 0.0), describe("largest interlacing violation ", worst)};
}

Measurement moment_match(const Context& c, std::size_t spectra, std::uint64_t tag,
                         std::pair<double, double> (*moments)(Index, Index)) {
  const std::pair<Index, Index> cases[] = {{10, 10}, {40, 20}, {20, 40}};
  double worst = 0.0;
  std::ostringstream detail;
  for (const auto& [m, big_n] : cases) {
    std::vector<double> first(spectra);
    std::vector<double> second(spectra);
    parallel_for(spectra, c.workers, [&](std::size_t k) {
      const Spectrum s = eigen_spectrum(sample_gaussian_matrix(m, big_n, c.stream(tag).split(k)),
                                        SpectrumMode::kValuesOnly);
      first[k] = s.eigenvalues.sum();
      second[k] = s.eigenvalues.squaredNorm();
    });
    const auto [e1, e2] = moments(m, big_n);
    const double z1 = z_distance(summarize(first), {e1, 0.0});
    const double z2 = z_distance(summarize(second), {e2, 0.0});
    worst = std::max({worst, z1, z2});
    detail << "(" << m << "," << big_n << "): z " << z1 << ", " << z2 << "; ";
    ++tag;
  }
  return {worst, detail.str()};
}

Measurement wishart(const Context& c) { return moment_match(c, 500, 1000, wishart_moments); }

// Larger sample so that an N/m offset in the second moment would be visible.
Measurement exact_wishart(const Context& c) {
  return moment_match(c, 5000, 1010, exact_wishart_moments);
}

//---------------------------------------------------------------------------//
// dynamics

struct Problem {
  Matrix x;
  Vector y;
};

Problem regression_problem(const RngStream& stream, Index n, Index d) {
  CounterRng rng(stream);
  Problem out;
  out.x = sample_gaussian_matrix(n, d, rng);
  const Vector beta = sample_gaussian_vector(d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  out.y = out.x * beta + sample_gaussian_vector(n, 0.5, rng);
  return out;
}

Measurement flow_finite(const Context& c) {
  int bad = 0;
  const std::pair<Index, Index> shapes[] = {{20, 8}, {8, 20}, {30, 30}};
  std::uint64_t k = 0;
  for (const auto& [n, d] : shapes) {
    const Problem prob = regression_problem(c.stream(1100).split(k++), n, d);
    const GradientFlow flow(eigen_spectrum(prob.x), prob.x, prob.y);
    for (double t : {0.0, 1e-8, 0.3, 10.0, 1e6, 1e12})
      if (!flow.beta(t).allFinite()) ++bad;
  }
  bad += 1 - count_throws([&] {
    const Problem prob = regression_problem(c.stream(1101), 5, 3);
    gradient_flow_beta(eigen_spectrum(prob.x), prob.x, prob.y, -1.0);
  });
  return {static_cast<double>(bad), describe(bad, " non-finite iterates or accepted negative times")};
}

Measurement gd_trajectory(const Context& c) {
  int bad = 0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    const Problem prob = regression_problem(c.stream(1200).split(k), 30, 10);
    const double h = 0.99 / largest_curvature(prob.x);
    const GdTrajectory path = gradient_descent(prob.x, prob.y, h, 2000);
    if (path.iterates.front().norm() != 0.0) ++bad;
    for (const Vector& b : path.iterates)
      if (!b.allFinite()) {
        ++bad;
        break;
      }
  }
  return {static_cast<double>(bad), describe(bad, " trajectories with nonzero start or non-finite entries")};
}

Measurement monotone_loss(const Context& c) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Index n = k % 2 ? 15 : 40;
    const Problem prob = regression_problem(c.stream(1300).split(k), n, 25);
    const GradientFlow flow(eigen_spectrum(prob.x), prob.x, prob.y);
    const double start = prob.y.squaredNorm();
    double previous = start;
    for (int i = 0; i < 100; ++i) {
      const double t = 1e-3 * std::pow(1e5, i / 99.0);
      const double loss = (prob.y - prob.x * flow.beta(t)).squaredNorm();
      worst = std::max(worst, (loss - previous) / start);
      previous = loss;
    }
  }
  return {worst, describe("largest relative loss increase ", worst)};
}

Measurement row_space(const Context& c) {
  double worst = 0.0;
  const std::pair<Index, Index> shapes[] = {{10, 40}, {25, 30}, {40, 10}, {5, 5}};
  std::uint64_t k = 0;
  for (const auto& [n, d] : shapes) {
    const Problem prob = regression_problem(c.stream(1400).split(k++), n, d);
    Eigen::JacobiSVD<Matrix> svd(prob.x, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * sv(0)) ++rank;
    const Matrix row_basis = svd.matrixV().leftCols(rank);
    const GradientFlow flow(eigen_spectrum(prob.x), prob.x, prob.y);
    for (double t : {0.01, 0.5, 5.0, 500.0}) {
      const Vector b = flow.beta(t);
      const Vector off = b - row_basis * (row_basis.transpose() * b);
      worst = std::max(worst, off.norm() / b.norm());
    }
  }
  return {worst, describe("largest relative component outside the row space ", worst)};
}

// Ratio max_k gap / bound over the tested (h, K) grid.
Measurement discretization_ratio(const Context& c, bool sharp) {
  double worst = 0.0;
  std::ostringstream detail;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const Problem prob = regression_problem(c.stream(1500).split(k), 30, 10);
    const double s_max = largest_curvature(prob.x);
    for (const auto& [fraction, steps] :
         std::initializer_list<std::pair<double, Index>>{{0.005, 10000}, {0.05, 2000}, {0.5, 200}}) {
      const double h = fraction / s_max;
      const DiscretizationGap gap = measure_discretization_gap(prob.x, prob.y, h, steps);
      const double bound = sharp ? sharp_discretization_bound(prob.x, prob.y, h)
                                 : discretization_bound(prob.x, prob.y, h);
      const double ratio = gap.max_gap / bound;
      if (ratio > worst) {
        worst = ratio;
        detail.str("");
        detail << "worst at h*s_max=" << fraction << ": gap " << gap.max_gap << " vs bound "
               << bound;
      }
    }
  }
  return {worst, detail.str()};
}

//---------------------------------------------------------------------------//
// risk

Measurement model_spec_constraints(const Context&) {
  int bad = 0;
  const ModelSpec rejected[] = {over_spec(10, 5, 6), under_spec(10, 6, 5), over_spec(10, 20, 5, -1.0),
                                over_spec(10, 20, 5, 1.0, 0.0), over_spec(0, 20, 5)};
  for (const ModelSpec& s : rejected) bad += 1 - count_throws([&] { s.validate(); });
  const ModelSpec accepted[] = {over_spec(10, 5, 5), under_spec(10, 5, 5), over_spec(1, 1, 1, 0.0)};
  for (const ModelSpec& s : accepted) bad += count_throws([&] { s.validate(); });
  return {static_cast<double>(bad), describe(bad, " specs misclassified")};
}

Measurement t0_anchor(const Context& c) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const ModelSpec over = over_spec(30 + 20 * k, 60, 10, 0.5 + k, 2.0);
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(over.n, over.d, c.stream(1600).split(k)));
    const double want = over.sigma_sq + over.theta_norm_sq;
    worst = std::max(worst, std::abs(expected_risk_over(s, over, 0.0) - want) / want);
    const ModelSpec under = under_spec(30, 10 + 5 * k, 400, 1.0 + k, 4.0);
    const UnderRiskModel model(under, 50, c.stream(1601).split(k));
    const double want_under = under.sigma_sq + under.theta_norm_sq;
    worst = std::max(worst, std::abs(model.risk(0.0).estimate - want_under) / want_under);
  }
  return {worst, describe("max relative deviation from sigma^2 + |theta|^2: ", worst)};
}

Measurement derivative_vs_difference(const Context& c) {
  constexpr double kOverTol = 1e-5;
  constexpr double kUnderTol = 1e-4;
  double over_worst = 0.0;
  double under_worst = 0.0;
  CounterRng rng(c.stream(1700));
  for (int k = 0; k < 20; ++k) {
    const Index n = 10 + static_cast<Index>(rng.uniform() * 190);
    const Index d = 10 + static_cast<Index>(rng.uniform() * 190);
    const double theta = 0.1 + 4.9 * rng.uniform();
    const double sigma = 0.1 + 4.9 * rng.uniform();
    const double t = 0.05 * std::pow(100.0, rng.uniform());
    const ModelSpec spec = over_spec(n, d, std::min<Index>(d, 5), theta, sigma);
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(n, d, rng), SpectrumMode::kValuesOnly);
    const double step = 1e-6 * std::max(1.0, t);
    const double fd = (expected_risk_over(s, spec, t + step) - expected_risk_over(s, spec, t - step)) /
                      (2.0 * step);
    const double exact = risk_derivative_over(s, spec, t);
    const double floor = 1e-4 * std::abs(risk_derivative_over(s, spec, 0.0));
    over_worst = std::max(over_worst, std::abs(fd - exact) / (std::abs(exact) + floor));
  }
  const ModelSpec under = under_spec(30, 20, 400, 1.0, 4.0);
  const UnderRiskModel model(under, 500, c.stream(1701));
  for (int k = 0; k < 20; ++k) {
    const double t = 1e-3 * std::pow(1e3, k / 19.0);
    const double step = 1e-6 * std::max(1e-2, t);
    const double fd = (model.risk(t + step).estimate - model.risk(t - step).estimate) / (2.0 * step);
    const double exact = model.derivative(t).estimate;
    const double floor = 1e-4 * std::abs(model.derivative(0.0).estimate);
    under_worst = std::max(under_worst, std::abs(fd - exact) / (std::abs(exact) + floor));
  }
  const double scaled = std::max(over_worst / kOverTol, under_worst / kUnderTol);
  return {scaled, describe("relative error over ", over_worst, " (tol ", kOverTol, "), under ",
                           under_worst, " (tol ", kUnderTol, "); reported as max error/tol")};
}

Measurement bayes_floor(const Context& c) {
  double worst = kInf;
  const auto times = TimeGrid{1e-4, 100.0, 80}.points();
  for (std::uint64_t k = 0; k < 4; ++k) {
    const ModelSpec over = over_spec(20 + 40 * k, 100, 10, 1.0 + k, 0.5);
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(over.n, over.d, c.stream(1800).split(k)),
                                      SpectrumMode::kValuesOnly);
    const ModelSpec under = under_spec(10 + 20 * k, 20, 400, 1.0, 4.0);
    const UnderRiskModel model(under, 200, c.stream(1801).split(k));
    for (double t : times) {
      worst = std::min(worst, expected_risk_over(s, over, t) / over.sigma_sq - 1.0);
      worst = std::min(worst, model.risk(t).estimate / under.sigma_sq - 1.0);
    }
  }
  return {worst, describe("smallest risk/sigma^2 - 1: ", worst)};
}

Measurement haar_average(const Context& c) {
  constexpr Index kN = 20;
  constexpr Index kD = 40;
  constexpr Index kP = 5;
  constexpr std::size_t kDraws = 2000;
  const Matrix x = sample_gaussian_matrix(kN, kD, c.stream(1900));
  const Spectrum s = eigen_spectrum(x);
  Vector theta = Vector::Zero(kP);
  theta(0) = 1.0;
  const std::vector<double> times{0.05, 0.3, 1.0, 3.0};
  std::vector<std::vector<double>> samples(times.size(), std::vector<double>(kDraws));
  parallel_for(kDraws, c.workers, [&](std::size_t j) {
    const Matrix p = sample_haar_semi_orthogonal(kP, kD, Orientation::kRowOrthonormal,
                                                 c.stream(1901).split(j))
                         .entries;
    const Vector v = p.transpose() * theta;
    const Vector coords = s.eigenvectors.transpose() * v;
    const double outside = v.squaredNorm() - coords.squaredNorm();
    for (std::size_t m = 0; m < times.size(); ++m) {
      double total = outside;
      for (Index i = 0; i < coords.size(); ++i)
        total += std::exp(-2.0 * times[m] * s.eigenvalues(i)) * coords(i) * coords(i);
      samples[m][j] = total;
    }
  });
  double worst = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    double expected = 0.0;
    for (Index i = 0; i < kD; ++i) expected += std::exp(-2.0 * times[m] * s.eigenvalues(i));
    expected /= static_cast<double>(kD);
    worst = std::max(worst, z_distance(summarize(samples[m]), {expected, 0.0}));
  }
  return {worst, describe("largest |z| over ", times.size(), " times: ", worst)};
}

Measurement oracle_equivalence(const Context& c) {
  const ModelSpec specs[] = {over_spec(50, 100, 10), over_spec(80, 40, 5, 2.0, 0.5),
                             over_spec(30, 30, 10, 1.0, 1.0), over_spec(100, 200, 20, 0.5, 2.0),
                             over_spec(20, 60, 3, 3.0, 1.0)};
  const std::vector<double> times{0.05, 0.2, 0.5, 1.0, 3.0};
  double worst = 0.0;
  std::uint64_t k = 0;
  for (const ModelSpec& spec : specs) {
    const Matrix x = sample_gaussian_matrix(spec.n, spec.d, c.stream(2000).split(k));
    const Spectrum s = eigen_spectrum(x, SpectrumMode::kValuesOnly);
    const auto mc = mc_risk_oracle_over(x, spec, times, 2000, c.stream(2001).split(k), c.workers);
    for (std::size_t m = 0; m < times.size(); ++m)
      worst = std::max(worst, z_distance(mc[m], {expected_risk_over(s, spec, times[m]), 0.0}));
    ++k;
  }
  return {worst, describe("largest |z| over 25 (instance, time) pairs: ", worst)};
}

//---------------------------------------------------------------------------//
// stopping

Measurement bound_ordering(const Context&) {
  int bad = 0;
  for (Index n : {2, 10, 100, 1600, 10000})
    for (Index d : {2, 10, 100, 1600, 10000})
      for (double theta : {0.0, 0.3, 1.0, 10.0}) {
        const BoundInterval b = theorem1_bounds(over_spec(n, d, 1, theta));
        if (b.hypothesis_satisfied && !(b.lower <= b.upper)) ++bad;
      }
  for (Index n : {1, 10, 100})
    for (Index d : {1, 20, 200})
      for (double theta : {0.0, 0.3, 1.0, 10.0}) {
        const BoundInterval b = theorem2_bounds(under_spec(n, d, 2000, theta));
        if (b.hypothesis_satisfied && !(b.lower <= b.upper)) ++bad;
      }
  return {static_cast<double>(bad), describe(bad, " intervals with lower > upper")};
}

Measurement stopping_bracket(const Context& c) {
  double worst = 0.0;
  int sign_violations = 0;
  auto inspect = [&](const std::function<double(double)>& derivative, double scale) {
    const StoppingResult r = find_topt(derivative, scale);
    for (int i = 0; i < 200; ++i) {
      const double t = 1e-6 * scale * std::pow(r.bracket_lower / (1e-6 * scale), i / 199.0);
      if (!(derivative(t) < 0.0)) ++sign_violations;
    }
    worst = std::max(worst, std::abs(r.derivative_at_t_opt) / std::abs(derivative(1e-6 * scale)));
  };
  for (std::uint64_t k = 0; k < 4; ++k) {
    const ModelSpec over = over_spec(50 + 50 * k, 200, 10);
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(over.n, over.d, c.stream(2100).split(k)),
                                      SpectrumMode::kValuesOnly);
    inspect([&](double t) { return risk_derivative_over(s, over, t); }, default_t_scale(over));
    const ModelSpec under = under_spec(20 + 20 * k, 20, 400, 1.0, 4.0);
    const UnderRiskModel model(under, 200, c.stream(2101).split(k));
    inspect([&](double t) { return model.derivative(t).estimate; }, default_t_scale(under));
  }
  const double measured = sign_violations ? kInf : worst;
  return {measured, describe(sign_violations, " nonnegative derivatives before the bracket; max |D(t_opt)|/|D(0+)| ",
                             worst)};
}

Measurement theorem1_containment(const Context& c) {
  constexpr std::size_t kSeeds = 50;
  const std::pair<Index, Index> cases[] = {{100, 1600}, {1600, 100}};
  double worst_failures = 0.0;
  std::ostringstream detail;
  std::uint64_t tag = 2200;
  for (const auto& [n, d] : cases) {
    const ModelSpec spec = over_spec(n, d, 10);
    const BoundInterval b = theorem1_bounds(spec);
    std::vector<int> miss(kSeeds, 0);
    parallel_for(kSeeds, c.workers, [&](std::size_t k) {
      const Spectrum s = eigen_spectrum(sample_gaussian_matrix(n, d, c.stream(tag).split(k)),
                                        SpectrumMode::kValuesOnly);
      miss[k] = b.contains(find_topt_over(s, spec).t_opt) ? 0 : 1;
    });
    int failures = 0;
    for (int m : miss) failures += m;
    worst_failures = std::max(worst_failures, static_cast<double>(failures));
    detail << "(n=" << n << ",d=" << d << ") gamma " << b.gamma << ": " << failures
           << " of " << kSeeds << " outside; ";
    ++tag;
  }
  return {worst_failures, detail.str()};
}

Measurement theorem2_containment(const Context& c) {
  constexpr std::size_t kSeeds = 50;
  const ModelSpec spec = under_spec(40, 20, 2000);
  const BoundInterval b = theorem2_bounds(spec);
  std::vector<int> hit(kSeeds, 0);
  parallel_for(kSeeds, c.workers, [&](std::size_t k) {
    const UnderRiskModel model(spec, 4000, c.stream(2300).split(k));
    hit[k] = b.contains(find_topt_under(model).t_opt) ? 1 : 0;
  });
  int count = 0;
  for (int h : hit) count += h;
  return {static_cast<double>(count), describe(count, " of ", kSeeds, " inside [", b.lower, ", ",
                                               b.upper, "], hypothesis ", b.hypothesis_note)};
}

// Counts adjacent pairs of summary medians that break the expected order.
int trend_violations(const SweepResult& r, const std::vector<Index>& ns,
                     const std::vector<Index>& ds, bool increasing, std::ostringstream& detail) {
  int bad = 0;
  double previous = std::nan("");
  for (Index n : ns)
    for (Index d : ds) {
      const double t = r.summary(n, d).t_opt;
      detail << t << " ";
      if (!std::isnan(previous) && !(increasing ? t > previous : t < previous)) ++bad;
      if (std::isnan(t)) ++bad;
      previous = t;
    }
  detail << "| ";
  return bad;
}

ExperimentConfig trend_config(const Context& c, Setting setting, std::vector<Index> ns,
                              std::vector<Index> ds, Index p, double sigma) {
  ExperimentConfig config;
  config.setting = setting;
  config.n_values = std::move(ns);
  config.d_values = std::move(ds);
  config.p = p;
  config.sigma_sq = sigma;
  config.seeds.clear();
  for (std::uint64_t k = 0; k < 10; ++k) config.seeds.push_back(c.seed * 1000 + k);
  config.trials = 2000;
  config.workers = c.workers;
  return config;
}

Measurement trend_over(const Context& c) {
  std::ostringstream detail;
  int bad = 0;
  const std::vector<Index> d_axis{200, 400, 800, 1600};
  const std::vector<Index> n_axis{25, 50, 100, 200};
  bad += trend_violations(run_sweep(trend_config(c, Setting::kOver, {100}, d_axis, 10, 1.0)),
                          {100}, d_axis, false, detail);
  bad += trend_violations(run_sweep(trend_config(c, Setting::kOver, n_axis, {800}, 10, 1.0)),
                          n_axis, {800}, true, detail);
  return {static_cast<double>(bad), describe(bad, " order violations; medians ", detail.str())};
}

Measurement trend_under(const Context& c) {
  std::ostringstream detail;
  int bad = 0;
  const std::vector<Index> axis{10, 20, 40, 80};
  bad += trend_violations(run_sweep(trend_config(c, Setting::kUnder, {40}, axis, 400, 4.0)), {40},
                          axis, true, detail);
  bad += trend_violations(run_sweep(trend_config(c, Setting::kUnder, axis, {20}, 400, 4.0)), axis,
                          {20}, true, detail);
  return {static_cast<double>(bad), describe(bad, " order violations; medians ", detail.str())};
}

Measurement scale_invariance(const Context& c) {
  double worst = 0.0;
  auto rel = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  const ModelSpec over = over_spec(100, 400, 10, 1.0, 1.0);
  const ModelSpec under = under_spec(40, 20, 2000, 1.0, 1.0);
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(over.n, over.d, c.stream(2400)),
                                    SpectrumMode::kValuesOnly);
  const double base_over = find_topt_over(s, over).t_opt;
  const UnderRiskModel base_model(under, 500, c.stream(2401));
  const double base_under = find_topt_under(base_model).t_opt;
  const BoundInterval b1 = theorem1_bounds(over);
  const BoundInterval b2 = theorem2_bounds(under);
  for (double factor : {0.01, 7.5, 1000.0}) {
    ModelSpec o = over;
    o.theta_norm_sq *= factor;
    o.sigma_sq *= factor;
    ModelSpec u = under;
    u.theta_norm_sq *= factor;
    u.sigma_sq *= factor;
    const UnderRiskModel model(u, 500, c.stream(2401));
    const BoundInterval c1 = theorem1_bounds(o);
    const BoundInterval c2 = theorem2_bounds(u);
    worst = std::max({worst, rel(find_topt_over(s, o).t_opt, base_over),
                      rel(find_topt_under(model).t_opt, base_under), rel(c1.lower, b1.lower),
                      rel(c1.upper, b1.upper), rel(c2.lower, b2.lower), rel(c2.upper, b2.upper)});
  }
  return {worst, describe("largest relative change ", worst)};
}

//---------------------------------------------------------------------------//
// asymptotics

Measurement mp_identities(const Context&) {
  constexpr double kMassTol = 1e-8;
  constexpr double kMomentTol = 1e-7;
  double mass_err = 0.0;
  double mean_err = 0.0;
  double second_err = 0.0;
  for (double gamma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const MpLaw law(gamma);
    mass_err = std::max(mass_err,
                        std::abs(integrate_mp(law, [](double) { return 1.0; }).value - law.continuous_mass()));
    mean_err = std::max(mean_err, std::abs(integrate_mp(law, [](double l) { return l; }).value - 1.0));
    const double want = 1.0 + 1.0 / gamma;
    second_err = std::max(second_err,
                          std::abs(integrate_mp(law, [](double l) { return l * l; }).value - want) / want);
  }
  const double scaled = std::max({mass_err / kMassTol, mean_err / kMomentTol, second_err / kMomentTol});
  return {scaled, describe("mass error ", mass_err, ", mean error ", mean_err,
                           ", second moment relative error ", second_err, "; reported as max error/tol")};
}

Measurement interval_order(const Context&) {
  int bad = 0;
  int tested = 0;
  for (int i = 1; i < 40; ++i) {
    const double gamma = 0.25 * std::pow(16.0, i / 40.0);
    for (int j = 1; j < 40; ++j) {
      const double rho = (2.0 - std::sqrt(3.0)) * j / 40.0;
      const IntervalSet s = interval_set(gamma, rho);
      if (!s.applicable) continue;
      ++tested;
      if (!(s.decreasing_until <= s.increasing_from)) ++bad;
    }
  }
  return {static_cast<double>(bad), describe(bad, " of ", tested, " applicable cases out of order")};
}

Measurement spectral_convergence(const Context& c) {
  constexpr Index kN = 4000;
  constexpr Index kD = 2000;
  constexpr int kBins = 20;
  const MpLaw law(static_cast<double>(kN) / static_cast<double>(kD));
  const Spectrum s = eigen_spectrum(sample_gaussian_matrix(kN, kD, c.stream(2500)),
                                    SpectrumMode::kValuesOnly);
  const double width = (law.upper_edge - law.lower_edge) / kBins;
  std::vector<double> counts(kBins, 0.0);
  for (Index i = 0; i < s.dimension(); ++i) {
    const int bin = static_cast<int>(std::floor((s.eigenvalues(i) - law.lower_edge) / width));
    if (bin >= 0 && bin < kBins) counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  double worst = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double lo = law.lower_edge + b * width;
    const double expected = mp_interval_mass(law, lo, lo + width);
    worst = std::max(worst, std::abs(counts[static_cast<std::size_t>(b)] / kD - expected));
  }
  return {worst, describe("max bin error over ", kBins, " bins: ", worst)};
}

Measurement sandwich(const Context&) {
  double worst = 0.0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    const MpLaw law(gamma);
    for (int i = 0; i < 100; ++i) {
      const double lambda = law.lower_edge + (law.upper_edge - law.lower_edge) * i / 99.0;
      for (int j = 0; j < 100; ++j) {
        const double t = 10.0 / law.upper_edge * j / 99.0;
        const SandwichValues v = sandwich_bounds(gamma, 1.0, 1.0, t, lambda);
        const double scale = 1.0 + std::abs(v.exact);
        worst = std::max({worst, (v.lower - v.exact) / scale, (v.exact - v.upper) / scale});
      }
    }
  }
  return {std::max(worst, 0.0), describe("largest scaled violation ", worst)};
}

Measurement sign_consistency(const Context&) {
  int bad = 0;
  int tested = 0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    const double snr = 0.1 / (gamma + 1.0);
    const IntervalSet s = asymptotic_intervals(gamma, snr, 1.0).primary;
    for (int i = 1; i <= 50; ++i) {
      const double early = s.decreasing_until * i / 51.0;
      const double late = s.increasing_from + (s.increasing_until - s.increasing_from) * i / 51.0;
      bad += asymptotic_risk_derivative(gamma, snr, 1.0, early) > 0.0;
      bad += asymptotic_risk_derivative(gamma, snr, 1.0, late) < 0.0;
      tested += 2;
    }
  }
  for (double gamma : {0.1, 10.0}) {
    const EdgeRegime e = asymptotic_intervals(gamma, 1.0, 1.0).edge;
    for (int i = 1; i <= 20; ++i) {
      const double early = e.negative_until * i / 21.0;
      const double late = e.positive_from * (1.0 + i / 5.0);
      bad += asymptotic_risk_derivative(gamma, 1.0, 1.0, early) >= 0.0;
      bad += asymptotic_risk_derivative(gamma, 1.0, 1.0, late) <= 0.0;
      tested += 2;
    }
  }
  return {static_cast<double>(bad), describe(bad, " of ", tested, " points with the wrong sign")};
}

//---------------------------------------------------------------------------//
// experiments

ExperimentConfig small_sweep(const Context& c, Setting setting, int workers) {
  ExperimentConfig config;
  config.setting = setting;
  config.n_values = {20, 60};
  config.d_values = setting == Setting::kOver ? std::vector<Index>{40, 80} : std::vector<Index>{10, 20};
  config.p = setting == Setting::kOver ? 5 : 400;
  config.seeds = {c.seed, c.seed + 1, c.seed + 2};
  config.trials = 200;
  config.workers = workers;
  return config;
}

Measurement config_invariants(const Context&) {
  int bad = 0;
  const char* rejected[] = {R"({"n_values": []})", R"({"trials": 0})",
                            R"({"t_grid": {"min": 2, "max": 1}})", R"({"seeds": []})",
                            R"({"sigma_sq": 0})", R"({"unknown_key": 1})"};
  for (const char* text : rejected)
    bad += 1 - count_throws([&] { ExperimentConfig::from_json(nlohmann::json::parse(text)).validate(); });
  bad += count_throws([&] {
    ExperimentConfig::from_json(nlohmann::json::parse(R"({"n_values": [10, 20], "seed_count": 3})"))
        .validate();
  });
  return {static_cast<double>(bad), describe(bad, " configs misclassified")};
}

Measurement sweep_row_consistency(const Context& c) {
  int bad = 0;
  for (Setting setting : {Setting::kOver, Setting::kUnder}) {
    const SweepResult r = run_sweep(small_sweep(c, setting, c.workers));
    std::vector<SweepRow> rows = r.cells;
    rows.insert(rows.end(), r.summaries.begin(), r.summaries.end());
    for (const SweepRow& row : rows)
      if (row.in_bounds != (row.bound_lower <= row.t_opt && row.t_opt <= row.bound_upper)) ++bad;
  }
  return {static_cast<double>(bad), describe(bad, " rows with inconsistent in_bounds")};
}

Measurement determinism(const Context& c) {
  int bad = 0;
  for (Setting setting : {Setting::kOver, Setting::kUnder}) {
    const ExperimentConfig config = small_sweep(c, setting, 1);
    if (run_sweep(config).table().to_csv() != run_sweep(config).table().to_csv()) ++bad;
  }
  return {static_cast<double>(bad), describe(bad, " settings with differing output")};
}

Measurement parallel_equivalence(const Context& c) {
  int bad = 0;
  for (Setting setting : {Setting::kOver, Setting::kUnder}) {
    const std::string serial = run_sweep(small_sweep(c, setting, 1)).table().to_csv();
    const std::string parallel = run_sweep(small_sweep(c, setting, 4)).table().to_csv();
    if (serial != parallel) ++bad;
  }
  return {static_cast<double>(bad), describe(bad, " settings where 1 and 4 workers differ")};
}

Measurement csv_round_trip(const Context& c) {
  int bad = 0;
  for (Setting setting : {Setting::kOver, Setting::kUnder}) {
    const Table table = run_sweep(small_sweep(c, setting, c.workers)).table();
    if (!(Table::from_csv(table.to_csv(), table.columns()) == table)) ++bad;
  }
  return {static_cast<double>(bad), describe(bad, " tables that did not round-trip")};
}

//---------------------------------------------------------------------------//

const std::vector<CheckSpec>& registry() {
  using C = Comparison;
  static const std::vector<CheckSpec> checks{
      {"sampling.stream_determinism", "sampling", "identical streams give identical draws", 0, C::kAtMost, stream_determinism},
      {"sampling.stream_independence", "sampling", "distinct streams are uncorrelated", 4.0, C::kAtMost, stream_independence},
      {"sampling.data_matrix_finite", "sampling", "data matrices have the requested shape and finite entries", 0, C::kAtMost, data_matrix_finite},
      {"sampling.orthonormality_residual", "sampling", "semi-orthogonal residual at most 1e-12", 1e-12, C::kAtMost, orthonormality},
      {"sampling.parallel_serial_generation", "sampling", "parallel generation equals serial generation", 0, C::kAtMost, parallel_generation},
      {"sampling.rotational_invariance", "sampling", "KS test of P^T theta against a rotated copy, level 0.01", 0.01, C::kAtLeast, rotational_invariance},
      {"spectral.eigenvalues_nonnegative", "spectral", "eigenvalues clamped nonnegative and descending", 0, C::kAtMost, eigenvalues_nonnegative},
      {"spectral.rank_count", "spectral", "rank mask count at most min(n, d)", 0, C::kAtMost, rank_count},
      {"spectral.reconstruction", "spectral", "(1/n) X^T X rebuilt from the spectrum", 1e-9, C::kAtMost, reconstruction},
      {"spectral.concentration_interval_order", "spectral", "concentration intervals satisfy 0 <= lower <= upper", 0, C::kAtMost, concentration_ordering},
      {"spectral.trace_identity", "spectral", "eigenvalue sum equals the scaled Frobenius norm", 1e-9, C::kAtMost, trace_identity},
      {"spectral.concentration_coverage", "spectral", "at least 48 of 50 spectra at (100, 10000) inside the interval", 48, C::kAtLeast, concentration_coverage},
      {"spectral.interlacing", "spectral", "eigenvalues interlace after appending a row", 1e-8, C::kAtMost, interlacing},
      {"spectral.wishart_moments", "spectral", "Monte Carlo moments within 3 standard errors", 3.0, C::kAtMost, wishart},
      {"spectral.exact_wishart_moments", "spectral", "Monte Carlo moments vs the corrected second moment (5000 spectra)", 3.0, C::kAtMost, exact_wishart},
      {"dynamics.flow_finite", "dynamics", "flow iterates finite for all t >= 0", 0, C::kAtMost, flow_finite},
      {"dynamics.gd_trajectory", "dynamics", "descent starts at zero and stays finite for h < 1/s_max", 0, C::kAtMost, gd_trajectory},
      {"dynamics.monotone_training_loss", "dynamics", "training loss nonincreasing along the flow", 1e-12, C::kAtMost, monotone_loss},
      {"dynamics.row_space", "dynamics", "flow iterate stays in the row space of X", 1e-9, C::kAtMost, row_space},
      {"dynamics.discretization_bound", "dynamics", "max gap / displayed discretization bound at most 1", 1.0, C::kAtMost,
       [](const Context& c) { return discretization_ratio(c, false); }},
      {"dynamics.sharp_discretization_bound", "dynamics", "max gap / sharp discretization bound at most 1", 1.0, C::kAtMost,
       [](const Context& c) { return discretization_ratio(c, true); }},
      {"risk.model_spec_constraints", "risk", "invalid model specs rejected, valid ones accepted", 0, C::kAtMost, model_spec_constraints},
      {"risk.t0_anchor", "risk", "risk at t = 0 equals sigma^2 + |theta|^2", 1e-12, C::kAtMost, t0_anchor},
      {"risk.analytic_derivative", "risk", "analytic derivative matches central differences", 1.0, C::kAtMost, derivative_vs_difference},
      {"risk.bayes_floor", "risk", "every risk value at least sigma^2", -1e-12, C::kAtLeast, bayes_floor},
      {"risk.haar_average_identity", "risk", "Haar average of the decayed projection within 3 standard errors", 3.0, C::kAtMost, haar_average},
      {"risk.oracle_equivalence", "risk", "closed form vs simulation oracle within 3 standard errors", 3.0, C::kAtMost, oracle_equivalence},
      {"stopping.bound_interval_order", "stopping", "lower <= upper whenever the hypothesis holds", 0, C::kAtMost, bound_ordering},
      {"stopping.result_bracket", "stopping", "derivative negative before the bracket and near zero at t_opt", 1e-6, C::kAtMost, stopping_bracket},
      {"stopping.over_containment", "stopping", "at most 2 of 50 seeds outside the over-setting interval", 2, C::kAtMost, theorem1_containment},
      {"stopping.under_containment", "stopping", "at least 48 of 50 seeds inside the under-setting interval", 48, C::kAtLeast, theorem2_containment},
      {"stopping.trend_over", "stopping", "median t_opt decreasing in d and increasing in n", 0, C::kAtMost, trend_over},
      {"stopping.trend_under", "stopping", "median t_opt increasing in d and in n", 0, C::kAtMost, trend_under},
      {"stopping.scale_invariance", "stopping", "t_opt and intervals unchanged under joint rescaling", 1e-10, C::kAtMost, scale_invariance},
      {"asymptotics.mp_moment_identities", "asymptotics", "mass, mean and second moment of the limiting law", 1.0, C::kAtMost, mp_identities},
      {"asymptotics.interval_order", "asymptotics", "decreasing_until <= increasing_from when applicable", 0, C::kAtMost, interval_order},
      {"asymptotics.spectral_convergence", "asymptotics", "eigenvalue histogram at (4000, 2000) vs the limit law", 0.01, C::kAtMost, spectral_convergence},
      {"asymptotics.sandwich", "asymptotics", "polynomial envelopes bracket the exact integrand", 1e-12, C::kAtMost, sandwich},
      {"asymptotics.sign_consistency", "asymptotics", "limiting derivative signs match the intervals", 0, C::kAtMost, sign_consistency},
      {"experiments.config_invariants", "experiments", "invalid configs rejected", 0, C::kAtMost, config_invariants},
      {"experiments.sweep_row_consistency", "experiments", "in_bounds agrees with t_opt and the bounds", 0, C::kAtMost, sweep_row_consistency},
      {"experiments.determinism", "experiments", "identical configs give byte-identical CSV", 0, C::kAtMost, determinism},
      {"experiments.parallel_serial_equivalence", "experiments", "worker count does not change the output", 0, C::kAtMost, parallel_equivalence},
      {"experiments.csv_round_trip", "experiments", "CSV parses back to the same table", 0, C::kAtMost, csv_round_trip},
  };
  return checks;
}

}  // namespace

bool ValidationReport::passed() const { return failures() == 0; }

std::size_t ValidationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
  };
  for (const CheckResult& c : checks) {
    list.push_back({{"name", c.name},
                    {"module", c.module},
                    {"description", c.description},
                    {"passed", c.passed},
                    {"measured", number(c.measured)},
                    {"threshold", number(c.threshold)},
                    {"comparison", c.comparison == Comparison::kAtMost ? "<=" : ">="},
                    {"threshold_overridden", c.threshold_overridden},
                    {"detail", c.detail},
                    {"seconds", c.seconds}});
  }
  return {{kSchemaColumn, kSchemaVersion},
          {"passed", passed()},
          {"failures", failures()},
          {"checks", std::move(list)}};
}

std::vector<std::string> validation_check_names() {
  std::vector<std::string> names;
  for (const CheckSpec& c : registry()) names.emplace_back(c.name);
  return names;
}

ValidationReport run_validation(const ExperimentConfig& config) {
  config.validate();
  const auto names = validation_check_names();
  const std::set<std::string> known(names.begin(), names.end());
  for (const auto& [name, value] : config.validation.tolerances)
    require(known.count(name) > 0, "validation: unknown check '" + name + "' in tolerances");
  for (const std::string& name : config.validation.checks)
    require(known.count(name) > 0, "validation: unknown check '" + name + "'");
  const std::set<std::string> selected(config.validation.checks.begin(),
                                       config.validation.checks.end());

  Context context;
  context.seed = config.seeds.front();
  context.workers = config.workers;

  ValidationReport report;
  for (const CheckSpec& spec : registry()) {
    if (!selected.empty() && selected.count(spec.name) == 0) continue;
    CheckResult result;
    result.name = spec.name;
    result.module = spec.module;
    result.description = spec.description;
    result.comparison = spec.comparison;
    result.threshold = spec.threshold;
    if (auto it = config.validation.tolerances.find(spec.name);
        it != config.validation.tolerances.end()) {
      result.threshold = it->second;
      result.threshold_overridden = true;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const Measurement m = spec.run(context);
      result.measured = m.measured;
      result.detail = m.detail;
      result.passed = spec.comparison == Comparison::kAtMost ? m.measured <= result.threshold
                                                             : m.measured >= result.threshold;
    } catch (const std::exception& e) {
      result.measured = std::nan("");
      result.detail = std::string("error: ") + e.what();
      result.passed = false;
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(result));
  }
  return report;
}

}  // namespace stoplab
