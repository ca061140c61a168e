// Command-line front end: one subcommand per experiment table plus the
// validation report.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stoplab/experiments.hpp"
#include "stoplab/validation.hpp"

namespace {

using stoplab::ConfigOverrides;
using stoplab::ExperimentConfig;

struct CommonOptions {
  std::string config_path;
  ConfigOverrides overrides;
  bool show_config = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "JSON experiment configuration")
      ->check(CLI::ExistingFile);
  app->add_option("--setting", o.overrides.setting, "over or under")
      ->check(CLI::IsMember({"over", "under"}));
  app->add_option("--n", o.overrides.n, "sample count");
  app->add_option("--d", o.overrides.d, "model dimension");
  app->add_option("--p", o.overrides.p, "feature dimension");
  app->add_option("--sigma-sq", o.overrides.sigma_sq, "label noise variance");
  app->add_option("--theta-norm-sq", o.overrides.theta_norm_sq, "squared norm of the true parameter");
  app->add_option("--seed", o.overrides.seed, "first master seed");
  app->add_option("--trials", o.overrides.trials, "Monte Carlo trials / sampled spectra");
  app->add_option("--out", o.overrides.out, "output path (stdout when omitted)");
  app->add_option("--format", o.overrides.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", o.overrides.workers, "worker threads (default: STOPLAB_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app->add_flag("--show-config", o.show_config, "print the resolved configuration as JSON and exit");
}

ExperimentConfig load(const CommonOptions& o) {
  ExperimentConfig config;
  bool workers_in_file = false;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw stoplab::InvalidArgument("cannot open config '" + o.config_path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw stoplab::InvalidArgument("config '" + o.config_path + "': " + e.what());
    }
    config = ExperimentConfig::from_json(doc);
    workers_in_file = doc.contains("workers");
  }
  if (!workers_in_file) config.workers = stoplab::default_workers();
  stoplab::apply_overrides(config, o.overrides);
  config.validate();
  return config;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw stoplab::InvalidArgument("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal early stopping for gradient flow on linear least squares"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    stoplab::Table (*run)(const ExperimentConfig&);
  };
  const Command tables[] = {
      {"risk-curve", "expected risk and its derivative on the time grid", stoplab::run_risk_curve},
      {"topt", "optimal stopping time per (n, d, seed) cell", stoplab::run_topt},
      {"sweep", "t_opt cells plus per-(n, d) summary rows",
       [](const ExperimentConfig& c) { return stoplab::run_sweep(c).table(); }},
      {"bounds", "predicted intervals and risk bounds", stoplab::run_bounds},
      {"asymptotic", "limiting risk derivative and monotonicity intervals", stoplab::run_asymptotic},
      {"discretization", "gradient descent vs flow gap and its bounds", stoplab::run_discretization},
  };

  std::vector<CommonOptions> options(std::size(tables) + 1);
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < std::size(tables); ++i) {
    CLI::App* sub = app.add_subcommand(tables[i].name, tables[i].help);
    add_common(sub, options[i]);
    commands.push_back(sub);
  }
  CLI::App* validate = app.add_subcommand("validate", "run every named check and report JSON");
  CommonOptions& validate_options = options.back();
  add_common(validate, validate_options);
  std::vector<std::string> only;
  bool list = false;
  validate->add_option("--check", only, "run only the named check (repeatable)");
  validate->add_flag("--list", list, "print the check names and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < std::size(tables); ++i) {
      if (!commands[i]->parsed()) continue;
      const ExperimentConfig config = load(options[i]);
      if (options[i].show_config) {
        std::cout << config.to_json().dump(2) << "\n";
        return 0;
      }
      emit(stoplab::render(tables[i].run(config), config.format), config.out);
      return 0;
    }
    if (list) {
      for (const auto& name : stoplab::validation_check_names()) std::cout << name << "\n";
      return 0;
    }
    ExperimentConfig config = load(validate_options);
    if (!only.empty()) config.validation.checks = only;
    if (validate_options.show_config) {
      std::cout << config.to_json().dump(2) << "\n";
      return 0;
    }
    const stoplab::ValidationReport report = stoplab::run_validation(config);
    emit(report.to_json().dump(2) + "\n", config.out);
    for (const auto& c : report.checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "stoplab: " << e.what() << "\n";
    return 2;
  }
}
