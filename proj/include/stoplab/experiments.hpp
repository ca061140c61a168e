#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stoplab/risk.hpp"
#include "stoplab/table.hpp"

namespace stoplab {

// Geometric grid of `count` times from min to max.
struct TimeGrid {
  double min = 1e-3;
  double max = 10.0;
  int count = 60;

  [[nodiscard]] std::vector<double> points() const;
};

struct ValidationOptions {
  // Replaces the threshold of the named check (harness self-tests).
  std::map<std::string, double> tolerances;
  // Restricts the run to these checks; empty runs everything.
  std::vector<std::string> checks;
};

struct ExperimentConfig {
  Setting setting = Setting::kOver;
  Index n = 100;
  Index d = 800;
  Index p = 0;  // 0: 10 for over, 400 for under, clamped to the cell's d
  double sigma_sq = 1.0;
  double theta_norm_sq = 1.0;
  std::vector<Index> n_values;  // sweep axes; empty means {n} / {d}
  std::vector<Index> d_values;
  std::vector<std::uint64_t> seeds{1};
  Index trials = 2000;
  double alpha = 1.0;  // t_bar = alpha n/(n+d) for the sample-size bounds
  TimeGrid t_grid;
  std::vector<double> gammas;  // asymptotic subcommand; empty means n/d
  double step_fraction = 0.005;  // gradient descent step h = step_fraction / s_max
  Index gd_steps = 10000;
  std::string out;
  OutputFormat format = OutputFormat::kCsv;
  int workers = 1;
  ValidationOptions validation;

  void validate() const;
  [[nodiscard]] std::vector<Index> n_axis() const;
  [[nodiscard]] std::vector<Index> d_axis() const;
  [[nodiscard]] ModelSpec cell_spec(Index cell_n, Index cell_d) const;

  // Unknown keys are rejected so that typos do not silently fall back to defaults.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  [[nodiscard]] nlohmann::json to_json() const;
};

// Command-line overrides; each present field replaces the config value.
// n and d also collapse the matching sweep axis to that single value, and
// seed re-bases the seed list at the given value keeping its length.
struct ConfigOverrides {
  std::optional<std::string> setting;
  std::optional<Index> n;
  std::optional<Index> d;
  std::optional<Index> p;
  std::optional<double> sigma_sq;
  std::optional<double> theta_norm_sq;
  std::optional<std::uint64_t> seed;
  std::optional<Index> trials;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> workers;
};

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

// Reads STOPLAB_WORKERS; 1 when unset or invalid.
int default_workers();

struct SweepRow {
  std::string row_kind = "cell";  // "cell" or "summary"
  Setting setting = Setting::kOver;
  Index n = 0;
  Index d = 0;
  Index p = 0;
  double sigma_sq = 0.0;
  double theta_norm_sq = 0.0;
  std::uint64_t seed = 0;  // summary rows: first seed of the group
  Index seed_count = 1;
  double t_opt = 0.0;
  double t_opt_std = 0.0;  // sample standard deviation across seeds
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  bool hypothesis_satisfied = false;
  bool in_bounds = false;
  double in_bounds_fraction = 0.0;
  double risk_at_t_opt = 0.0;
  double risk_std_error = 0.0;
  std::string status = "ok";
};

std::vector<Column> sweep_columns();
Table sweep_table(const std::vector<SweepRow>& rows);

struct SweepResult {
  std::vector<SweepRow> cells;      // ordered by (n, d, seed)
  std::vector<SweepRow> summaries;  // one per (n, d), ordered by (n, d)

  [[nodiscard]] Table table() const;
  // Summary row for (n, d); throws when absent.
  [[nodiscard]] const SweepRow& summary(Index n, Index d) const;
};

// Stream owned by one sweep cell.
RngStream cell_stream(std::uint64_t seed, Setting setting, Index n, Index d);

// One (n, d, seed) cell: sample the data, locate t_opt, evaluate the bound
// and the risk at t_opt. Errors are captured in `status`.
SweepRow run_cell(const ExperimentConfig& config, Index n, Index d, std::uint64_t seed,
                  int inner_workers = 1);

SweepResult run_sweep(const ExperimentConfig& config);

// Risk curve of the first (n, d, seed) cell on the time grid plus a marker
// row at t_opt.
std::vector<Column> risk_curve_columns();
Table run_risk_curve(const ExperimentConfig& config);

// Cell rows only.
Table run_topt(const ExperimentConfig& config);

// Theorem intervals, eigenvalue concentration and the risk bounds at the
// approximate optimum for every (n, d) of the config.
std::vector<Column> bounds_columns();
Table run_bounds(const ExperimentConfig& config);

// Limiting derivative on the time grid and the monotonicity intervals.
std::vector<Column> asymptotic_columns();
Table run_asymptotic(const ExperimentConfig& config);

// Gradient descent vs flow gap and both bounds, one row per seed.
std::vector<Column> discretization_columns();
Table run_discretization(const ExperimentConfig& config);

}  // namespace stoplab
