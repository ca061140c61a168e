#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stoplab/experiments.hpp"

namespace stoplab {

enum class Comparison { kAtMost, kAtLeast };  // measured <= threshold, measured >= threshold

struct CheckResult {
  std::string name;
  std::string module;
  std::string description;
  double measured = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::kAtMost;
  bool threshold_overridden = false;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] std::size_t failures() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

// Names of every registered check, in report order.
std::vector<std::string> validation_check_names();

// Runs every check (or the subset in config.validation.checks), applying any
// threshold overrides. Check failures are data; unknown check names in the
// filter or the override map are rejected.
ValidationReport run_validation(const ExperimentConfig& config);

}  // namespace stoplab
