#include <gtest/gtest.h>

#include <set>

#include "stoplab/validation.hpp"

using namespace stoplab;

TEST(Validation, NamesAreUnique) {
  const std::vector<std::string> names = validation_check_names();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  EXPECT_GE(names.size(), 40u);
}

TEST(Validation, FilteredRunPasses) {
  ExperimentConfig c;
  c.validation.checks = {"risk.t0_anchor", "asymptotics.interval_order", "sampling.orthonormality_residual"};
  const ValidationReport r = run_validation(c);
  ASSERT_EQ(r.checks.size(), 3u);
  EXPECT_TRUE(r.passed());
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j["passed"], true);
  EXPECT_EQ(j["checks"].size(), 3u);
  EXPECT_NO_THROW((void)nlohmann::json::parse(j.dump()));
}

TEST(Validation, PerturbedToleranceFails) {
  ExperimentConfig c;
  c.validation.checks = {"sampling.orthonormality_residual"};
  c.validation.tolerances["sampling.orthonormality_residual"] = -1.0;
  const ValidationReport r = run_validation(c);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(r.checks[0].threshold_overridden);
  EXPECT_EQ(r.failures(), 1u);
}

TEST(Validation, UnknownNamesRejected) {
  ExperimentConfig c;
  c.validation.checks = {"no.such_check"};
  EXPECT_THROW(run_validation(c), InvalidArgument);
  ExperimentConfig d;
  d.validation.tolerances["no.such_check"] = 1.0;
  EXPECT_THROW(run_validation(d), InvalidArgument);
}
