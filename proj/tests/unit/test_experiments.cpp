#include <gtest/gtest.h>

#include <cstdlib>

#include "stoplab/experiments.hpp"

using namespace stoplab;

namespace {
ExperimentConfig small_over() {
  ExperimentConfig c;
  c.n = 20;
  c.d = 60;
  c.p = 10;
  c.seeds = {3, 4, 5};
  return c;
}

ExperimentConfig small_under() {
  ExperimentConfig c;
  c.setting = Setting::kUnder;
  c.n = 20;
  c.d = 10;
  c.p = 200;
  c.sigma_sq = 4.0;
  c.trials = 200;
  c.seeds = {1, 2};
  return c;
}
}  // namespace

TEST(Config, JsonRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({
    "setting": "under", "n": 30, "d": 20, "p": 400, "sigma_sq": 4,
    "d_values": [10, 20], "seed": 7, "seed_count": 3, "trials": 50,
    "t_grid": {"min": 0.01, "max": 1, "count": 5}, "format": "json",
    "validation": {"tolerances": {"risk.t0_anchor": 1e-6}}
  })");
  const ExperimentConfig c = ExperimentConfig::from_json(doc);
  EXPECT_EQ(c.setting, Setting::kUnder);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(c.d_axis(), (std::vector<Index>{10, 20}));
  EXPECT_EQ(c.n_axis(), (std::vector<Index>{30}));
  EXPECT_EQ(c.t_grid.count, 5);
  EXPECT_EQ(c.format, OutputFormat::kJson);
  EXPECT_DOUBLE_EQ(c.validation.tolerances.at("risk.t0_anchor"), 1e-6);
  const ExperimentConfig again = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse(R"({"sigma": 1})")), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse(R"({"seeds": [1], "seed": 2})")), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse(R"({"n": "many"})")), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse("[1]")), InvalidArgument);
  ExperimentConfig c;
  c.trials = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig{};
  c.t_grid.min = 2.0;
  c.t_grid.max = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ExperimentConfig{};
  c.seeds.clear();
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Config, OverridesCollapseAxes) {
  ExperimentConfig c;
  c.d_values = {100, 200};
  c.seeds = {1, 2, 3};
  ConfigOverrides o;
  o.d = 50;
  o.seed = 10;
  o.setting = "under";
  o.format = "json";
  apply_overrides(c, o);
  EXPECT_EQ(c.d_axis(), (std::vector<Index>{50}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
  EXPECT_EQ(c.setting, Setting::kUnder);
  EXPECT_EQ(c.format, OutputFormat::kJson);
}

TEST(Config, DefaultProjectionDimension) {
  ExperimentConfig c;
  EXPECT_EQ(c.cell_spec(100, 800).p, 10);
  EXPECT_EQ(c.cell_spec(100, 5).p, 5);
  c.setting = Setting::kUnder;
  EXPECT_EQ(c.cell_spec(30, 20).p, 400);
  EXPECT_EQ(c.cell_spec(30, 1000).p, 1000);
}

TEST(Config, WorkersFromEnvironment) {
  ::setenv("STOPLAB_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3);
  ::setenv("STOPLAB_WORKERS", "zero", 1);
  EXPECT_EQ(default_workers(), 1);
  ::unsetenv("STOPLAB_WORKERS");
  EXPECT_EQ(default_workers(), 1);
}

TEST(Sweep, SingleCellSummaryMatches) {
  ExperimentConfig c = small_over();
  c.seeds = {9};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.cells.size(), 1u);
  ASSERT_EQ(r.summaries.size(), 1u);
  const Table t = r.table();
  ASSERT_EQ(t.rows().size(), 2u);
  const std::size_t kind = t.column_index("row_kind");
  for (std::size_t i = 0; i < t.columns().size(); ++i) {
    if (i == kind) continue;
    EXPECT_EQ(t.rows()[0][i], t.rows()[1][i]) << t.columns()[i].name;
  }
  EXPECT_EQ(std::get<std::string>(t.rows()[1][kind]), "summary");
}

TEST(Sweep, RowsConsistentWithBounds) {
  ExperimentConfig c = small_over();
  c.d_values = {60, 120};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.cells.size(), 6u);
  for (const SweepRow& row : r.cells) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_EQ(row.in_bounds, row.bound_lower <= row.t_opt && row.t_opt <= row.bound_upper);
    EXPECT_GE(row.risk_at_t_opt, row.sigma_sq);
  }
  EXPECT_NO_THROW((void)r.summary(20, 120));
  EXPECT_THROW((void)r.summary(20, 999), InvalidArgument);
}

TEST(Sweep, DeterministicAndWorkerIndependent) {
  ExperimentConfig c = small_under();
  c.n_values = {10, 20};
  const std::string serial = run_sweep(c).table().to_csv();
  EXPECT_EQ(run_sweep(c).table().to_csv(), serial);
  c.workers = 3;
  EXPECT_EQ(run_sweep(c).table().to_csv(), serial);
}

TEST(Sweep, CellErrorsAreRecorded) {
  ExperimentConfig c = small_over();
  c.theta_norm_sq = 0.0;  // derivative is nonnegative from the start
  c.seeds = {1};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_NE(r.cells[0].status, "ok");
}

TEST(Sweep, CsvRoundTrip) {
  const Table t = run_sweep(small_over()).table();
  EXPECT_TRUE(Table::from_csv(t.to_csv(), sweep_columns()) == t);
}

TEST(RiskCurve, UShapedAroundOptimum) {
  ExperimentConfig c = small_over();
  c.t_grid = TimeGrid{1e-3, 50.0, 200};
  const Table t = run_risk_curve(c);
  const std::size_t kind = t.column_index("row_kind");
  double t_opt = -1.0;
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    if (std::get<std::string>(t.rows()[i][kind]) == "t_opt") t_opt = t.real(i, "t");
  ASSERT_GT(t_opt, 0.0);
  double previous = INFINITY;
  bool rose_after = false;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    if (std::get<std::string>(t.rows()[i][kind]) != "curve") continue;
    const double time = t.real(i, "t");
    const double risk = t.real(i, "risk");
    if (time < t_opt) {
      EXPECT_LT(risk, previous) << time;
      EXPECT_LT(t.real(i, "derivative"), 0.0);
    } else if (!rose_after && risk > previous) {
      rose_after = true;
    }
    previous = risk;
  }
  EXPECT_TRUE(rose_after);
}

TEST(Bounds, ContainsExpectedRows) {
  ExperimentConfig c;
  c.n = 100;
  c.d = 10000;
  c.trials = 5;
  const Table t = run_bounds(c);
  bool found = false;
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    if (std::get<std::string>(t.at(i, "bound")) == "theorem1") {
      found = true;
      EXPECT_NEAR(t.real(i, "lower"), 0.0044080071818935026, 1e-15);
      EXPECT_NEAR(t.real(i, "upper"), 0.010884142815846683, 1e-15);
    }
  EXPECT_TRUE(found);
}

TEST(Asymptotic, TableHasIntervalsAndCurve) {
  ExperimentConfig c;
  c.n = 100;
  c.d = 100;
  c.theta_norm_sq = 0.05;
  c.t_grid.count = 5;
  const Table t = run_asymptotic(c);
  std::size_t curve = 0;
  bool statement = false;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const std::string kind = std::get<std::string>(t.rows()[i][t.column_index("row_kind")]);
    curve += kind == "derivative";
    statement = statement || kind == "statement_rho";
  }
  EXPECT_EQ(curve, 5u);
  EXPECT_TRUE(statement);
}

TEST(Discretization, OneRowPerSeed) {
  ExperimentConfig c;
  c.n = 30;
  c.d = 10;
  c.gd_steps = 200;
  c.seeds = {1, 2};
  const Table t = run_discretization(c);
  ASSERT_EQ(t.rows().size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(std::get<bool>(t.at(i, "sharp_bound_holds")), true);
    EXPECT_LE(t.real(i, "max_gap"), t.real(i, "sharp_bound"));
  }
}
