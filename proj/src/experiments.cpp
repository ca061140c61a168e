#include "stoplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "stoplab/asymptotics.hpp"
#include "stoplab/dynamics.hpp"
#include "stoplab/parallel.hpp"
#include "stoplab/sampling.hpp"
#include "stoplab/spectral.hpp"
#include "stoplab/stopping.hpp"

namespace stoplab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Cell integer(Index v) { return static_cast<std::int64_t>(v); }
Cell seed_cell(std::uint64_t v) { return static_cast<std::int64_t>(v); }

template <class T>
std::vector<T> read_list(const nlohmann::json& value, const char* key) {
  require(value.is_array() && !value.empty(), std::string("config: '") + key + "' must be a nonempty array");
  return value.get<std::vector<T>>();
}

}  // namespace

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = min;
    return out;
  }
  const double ratio = std::log(max / min) / static_cast<double>(count - 1);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = min * std::exp(ratio * k);
  out.back() = max;
  return out;
}

//---------------------------------------------------------------------------//
// Config

void ExperimentConfig::validate() const {
  require(n >= 1 && d >= 1, "config: n and d must be positive");
  require(p >= 0, "config: p must be nonnegative (0 selects the default)");
  require(sigma_sq > 0.0 && std::isfinite(sigma_sq), "config: sigma_sq must be positive");
  require(theta_norm_sq >= 0.0 && std::isfinite(theta_norm_sq),
          "config: theta_norm_sq must be nonnegative");
  for (Index v : n_axis()) require(v >= 1, "config: n values must be positive");
  for (Index v : d_axis()) require(v >= 1, "config: d values must be positive");
  require(!seeds.empty(), "config: at least one seed is required");
  require(trials >= 1, "config: trials must be at least 1");
  require(t_grid.min > 0.0 && t_grid.min < t_grid.max, "config: t_grid needs 0 < min < max");
  require(t_grid.count >= 2, "config: t_grid count must be at least 2");
  for (double g : gammas) require(g > 0.0, "config: gammas must be positive");
  require(alpha >= 0.0, "config: alpha must be nonnegative");
  require(step_fraction > 0.0 && step_fraction < 1.0, "config: step_fraction must lie in (0, 1)");
  require(gd_steps >= 0, "config: gd_steps must be nonnegative");
  require(workers >= 1, "config: workers must be at least 1");
}

std::vector<Index> ExperimentConfig::n_axis() const {
  return n_values.empty() ? std::vector<Index>{n} : n_values;
}

std::vector<Index> ExperimentConfig::d_axis() const {
  return d_values.empty() ? std::vector<Index>{d} : d_values;
}

ModelSpec ExperimentConfig::cell_spec(Index cell_n, Index cell_d) const {
  ModelSpec spec;
  spec.setting = setting;
  spec.n = cell_n;
  spec.d = cell_d;
  if (p > 0) spec.p = p;
  else spec.p = setting == Setting::kOver ? std::min<Index>(10, cell_d) : std::max<Index>(400, cell_d);
  spec.sigma_sq = sigma_sq;
  spec.theta_norm_sq = theta_norm_sq;
  return spec;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  require(doc.is_object(), "config: top level must be a JSON object");
  static const std::set<std::string> known{
      "setting", "n", "d", "p", "sigma_sq", "theta_norm_sq", "n_values", "d_values", "seeds",
      "seed", "seed_count", "trials", "alpha", "t_grid", "gammas", "step_fraction", "gd_steps",
      "out", "format", "workers", "validation"};
  for (const auto& [key, value] : doc.items())
    require(known.count(key) > 0, "config: unknown key '" + key + "'");

  ExperimentConfig c;
  try {
    if (doc.contains("setting")) c.setting = parse_setting(doc["setting"].get<std::string>());
    if (doc.contains("n")) c.n = doc["n"].get<Index>();
    if (doc.contains("d")) c.d = doc["d"].get<Index>();
    if (doc.contains("p")) c.p = doc["p"].get<Index>();
    if (doc.contains("sigma_sq")) c.sigma_sq = doc["sigma_sq"].get<double>();
    if (doc.contains("theta_norm_sq")) c.theta_norm_sq = doc["theta_norm_sq"].get<double>();
    if (doc.contains("n_values")) c.n_values = read_list<Index>(doc["n_values"], "n_values");
    if (doc.contains("d_values")) c.d_values = read_list<Index>(doc["d_values"], "d_values");
    if (doc.contains("seeds")) {
      require(!doc.contains("seed") && !doc.contains("seed_count"),
              "config: give either 'seeds' or 'seed'/'seed_count'");
      c.seeds = read_list<std::uint64_t>(doc["seeds"], "seeds");
    } else {
      const auto base = doc.value("seed", std::uint64_t{1});
      const auto count = doc.value("seed_count", std::int64_t{1});
      require(count >= 1, "config: seed_count must be positive");
      c.seeds.clear();
      for (std::int64_t k = 0; k < count; ++k) c.seeds.push_back(base + static_cast<std::uint64_t>(k));
    }
    if (doc.contains("trials")) c.trials = doc["trials"].get<Index>();
    if (doc.contains("alpha")) c.alpha = doc["alpha"].get<double>();
    if (doc.contains("t_grid")) {
      const auto& g = doc["t_grid"];
      require(g.is_object(), "config: 't_grid' must be an object");
      for (const auto& [key, value] : g.items())
        require(key == "min" || key == "max" || key == "count",
                "config: unknown t_grid key '" + key + "'");
      c.t_grid.min = g.value("min", c.t_grid.min);
      c.t_grid.max = g.value("max", c.t_grid.max);
      c.t_grid.count = g.value("count", c.t_grid.count);
    }
    if (doc.contains("gammas")) c.gammas = read_list<double>(doc["gammas"], "gammas");
    if (doc.contains("step_fraction")) c.step_fraction = doc["step_fraction"].get<double>();
    if (doc.contains("gd_steps")) c.gd_steps = doc["gd_steps"].get<Index>();
    if (doc.contains("out")) c.out = doc["out"].get<std::string>();
    if (doc.contains("format")) c.format = parse_format(doc["format"].get<std::string>());
    if (doc.contains("workers")) c.workers = doc["workers"].get<int>();
    if (doc.contains("validation")) {
      const auto& v = doc["validation"];
      require(v.is_object(), "config: 'validation' must be an object");
      for (const auto& [key, value] : v.items())
        require(key == "tolerances" || key == "checks",
                "config: unknown validation key '" + key + "'");
      if (v.contains("tolerances"))
        c.validation.tolerances = v["tolerances"].get<std::map<std::string, double>>();
      if (v.contains("checks")) c.validation.checks = v["checks"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json doc;
  doc["setting"] = to_string(setting);
  doc["n"] = n;
  doc["d"] = d;
  doc["p"] = p;
  doc["sigma_sq"] = sigma_sq;
  doc["theta_norm_sq"] = theta_norm_sq;
  if (!n_values.empty()) doc["n_values"] = n_values;
  if (!d_values.empty()) doc["d_values"] = d_values;
  doc["seeds"] = seeds;
  doc["trials"] = trials;
  doc["alpha"] = alpha;
  doc["t_grid"] = {{"min", t_grid.min}, {"max", t_grid.max}, {"count", t_grid.count}};
  if (!gammas.empty()) doc["gammas"] = gammas;
  doc["step_fraction"] = step_fraction;
  doc["gd_steps"] = gd_steps;
  if (!out.empty()) doc["out"] = out;
  doc["format"] = format == OutputFormat::kCsv ? "csv" : "json";
  doc["workers"] = workers;
  if (!validation.tolerances.empty() || !validation.checks.empty()) {
    doc["validation"] = nlohmann::json::object();
    if (!validation.tolerances.empty()) doc["validation"]["tolerances"] = validation.tolerances;
    if (!validation.checks.empty()) doc["validation"]["checks"] = validation.checks;
  }
  return doc;
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
  if (o.setting) c.setting = parse_setting(*o.setting);
  if (o.n) {
    c.n = *o.n;
    c.n_values.clear();
  }
  if (o.d) {
    c.d = *o.d;
    c.d_values.clear();
  }
  if (o.p) c.p = *o.p;
  if (o.sigma_sq) c.sigma_sq = *o.sigma_sq;
  if (o.theta_norm_sq) c.theta_norm_sq = *o.theta_norm_sq;
  if (o.seed) {
    const std::size_t count = std::max<std::size_t>(1, c.seeds.size());
    c.seeds.clear();
    for (std::size_t k = 0; k < count; ++k) c.seeds.push_back(*o.seed + k);
  }
  if (o.trials) c.trials = *o.trials;
  if (o.out) c.out = *o.out;
  if (o.format) c.format = parse_format(*o.format);
  if (o.workers) c.workers = *o.workers;
}

int default_workers() {
  const char* text = std::getenv("STOPLAB_WORKERS");
  if (!text || !*text) return 1;
  char* end = nullptr;
  const long value = std::strtol(text, &end, 10);
  if (*end != '\0' || value < 1 || value > 1024) return 1;
  return static_cast<int>(value);
}

//---------------------------------------------------------------------------//
// Sweeps

std::vector<Column> sweep_columns() {
  using K = ColumnKind;
  return {{kSchemaColumn, K::kInteger},
          {"row_kind", K::kText},
          {"setting", K::kText},
          {"n", K::kInteger},
          {"d", K::kInteger},
          {"p", K::kInteger},
          {"sigma_sq", K::kReal},
          {"theta_norm_sq", K::kReal},
          {"seed", K::kInteger},
          {"seed_count", K::kInteger},
          {"t_opt", K::kReal},
          {"t_opt_std", K::kReal},
          {"bound_lower", K::kReal},
          {"bound_upper", K::kReal},
          {"hypothesis_satisfied", K::kBoolean},
          {"in_bounds", K::kBoolean},
          {"in_bounds_fraction", K::kReal},
          {"risk_at_t_opt", K::kReal},
          {"risk_std_error", K::kReal},
          {"status", K::kText}};
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table table(sweep_columns());
  for (const SweepRow& r : rows) {
    table.add_row({kSchemaVersion, r.row_kind, std::string(to_string(r.setting)), integer(r.n),
                   integer(r.d), integer(r.p), r.sigma_sq, r.theta_norm_sq, seed_cell(r.seed),
                   integer(r.seed_count), r.t_opt, r.t_opt_std, r.bound_lower, r.bound_upper,
                   r.hypothesis_satisfied, r.in_bounds, r.in_bounds_fraction, r.risk_at_t_opt,
                   r.risk_std_error, r.status});
  }
  return table;
}

Table SweepResult::table() const {
  std::vector<SweepRow> rows = cells;
  rows.insert(rows.end(), summaries.begin(), summaries.end());
  return sweep_table(rows);
}

const SweepRow& SweepResult::summary(Index n, Index d) const {
  for (const SweepRow& r : summaries)
    if (r.n == n && r.d == d) return r;
  throw InvalidArgument("sweep: no summary row for the requested (n, d)");
}

RngStream cell_stream(std::uint64_t seed, Setting setting, Index n, Index d) {
  std::uint64_t id = splitmix64(setting == Setting::kOver ? 0x6f766572ULL : 0x756e6465ULL);
  id = splitmix64(id ^ static_cast<std::uint64_t>(n));
  id = splitmix64(id ^ (static_cast<std::uint64_t>(d) << 1));
  return RngStream{seed, id};
}

SweepRow run_cell(const ExperimentConfig& config, Index n, Index d, std::uint64_t seed,
                  int inner_workers) {
  const ModelSpec spec = config.cell_spec(n, d);
  SweepRow row;
  row.setting = spec.setting;
  row.n = n;
  row.d = d;
  row.p = spec.p;
  row.sigma_sq = spec.sigma_sq;
  row.theta_norm_sq = spec.theta_norm_sq;
  row.seed = seed;
  row.t_opt = row.bound_lower = row.bound_upper = row.risk_at_t_opt = row.risk_std_error = kNaN;
  try {
    spec.validate();
    const RngStream stream = cell_stream(seed, spec.setting, n, d);
    if (spec.setting == Setting::kOver) {
      if (n >= 2 && d >= 2) {
        const BoundInterval b = theorem1_bounds(spec);
        row.bound_lower = b.lower;
        row.bound_upper = b.upper;
        row.hypothesis_satisfied = b.hypothesis_satisfied;
      }
      const Spectrum s = eigen_spectrum(sample_gaussian_matrix(n, d, stream.split(0)),
                                        SpectrumMode::kValuesOnly);
      const StoppingResult r = find_topt_over(s, spec);
      row.t_opt = r.t_opt;
      row.risk_at_t_opt = expected_risk_over(s, spec, r.t_opt);
      row.risk_std_error = 0.0;
    } else {
      const BoundInterval b = theorem2_bounds(spec);
      row.bound_lower = b.lower;
      row.bound_upper = b.upper;
      row.hypothesis_satisfied = b.hypothesis_satisfied;
      const UnderRiskModel model(spec, config.trials, stream.split(1), inner_workers);
      const StoppingResult r = find_topt_under(model);
      row.t_opt = r.t_opt;
      const McEstimate risk = model.risk(r.t_opt);
      row.risk_at_t_opt = risk.estimate;
      row.risk_std_error = risk.std_error;
    }
    row.in_bounds = row.bound_lower <= row.t_opt && row.t_opt <= row.bound_upper;
    row.in_bounds_fraction = row.in_bounds ? 1.0 : 0.0;
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return row;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto ns = config.n_axis();
  const auto ds = config.d_axis();
  const auto& seeds = config.seeds;
  const std::size_t per_pair = seeds.size();
  const std::size_t count = ns.size() * ds.size() * per_pair;

  SweepResult result;
  result.cells.resize(count);
  const int outer = std::min<int>(config.workers, static_cast<int>(count));
  const int inner = count == 1 ? config.workers : 1;
  parallel_for(count, outer, [&](std::size_t k) {
    const std::size_t pair = k / per_pair;
    const Index n = ns[pair / ds.size()];
    const Index d = ds[pair % ds.size()];
    result.cells[k] = run_cell(config, n, d, seeds[k % per_pair], inner);
  });

  for (std::size_t pair = 0; pair < ns.size() * ds.size(); ++pair) {
    const auto first = result.cells.begin() + static_cast<std::ptrdiff_t>(pair * per_pair);
    const std::vector<SweepRow> group(first, first + static_cast<std::ptrdiff_t>(per_pair));
    SweepRow s = group.front();
    s.row_kind = "summary";
    s.seed_count = static_cast<Index>(group.size());
    std::vector<double> t_opts;
    std::vector<double> risks;
    std::vector<double> risk_errors;
    std::size_t inside = 0;
    std::string first_error;
    for (const SweepRow& r : group) {
      if (r.status != "ok") {
        if (first_error.empty()) first_error = r.status;
        continue;
      }
      t_opts.push_back(r.t_opt);
      risks.push_back(r.risk_at_t_opt);
      risk_errors.push_back(r.risk_std_error);
      if (r.in_bounds) ++inside;
    }
    s.t_opt = median(t_opts);
    s.t_opt_std = t_opts.empty() ? kNaN : sample_std(t_opts);
    s.risk_at_t_opt = median(risks);
    s.risk_std_error = median(risk_errors);
    s.in_bounds = s.bound_lower <= s.t_opt && s.t_opt <= s.bound_upper;
    s.in_bounds_fraction =
        t_opts.empty() ? 0.0 : static_cast<double>(inside) / static_cast<double>(t_opts.size());
    if (t_opts.empty()) s.status = "all seeds failed: " + first_error;
    else if (t_opts.size() < group.size())
      s.status = std::to_string(group.size() - t_opts.size()) + " of " +
                 std::to_string(group.size()) + " seeds failed: " + first_error;
    else s.status = "ok";
    result.summaries.push_back(std::move(s));
  }
  return result;
}

Table run_topt(const ExperimentConfig& config) { return sweep_table(run_sweep(config).cells); }

//---------------------------------------------------------------------------//
// Risk curve

std::vector<Column> risk_curve_columns() {
  using K = ColumnKind;
  return {{kSchemaColumn, K::kInteger}, {"row_kind", K::kText},
          {"setting", K::kText},        {"n", K::kInteger},
          {"d", K::kInteger},           {"p", K::kInteger},
          {"seed", K::kInteger},        {"t", K::kReal},
          {"risk", K::kReal},           {"risk_std_error", K::kReal},
          {"derivative", K::kReal},     {"derivative_std_error", K::kReal},
          {"status", K::kText}};
}

Table run_risk_curve(const ExperimentConfig& config) {
  config.validate();
  const Index n = config.n_axis().front();
  const Index d = config.d_axis().front();
  const std::uint64_t seed = config.seeds.front();
  const ModelSpec spec = config.cell_spec(n, d);
  spec.validate();
  const RngStream stream = cell_stream(seed, spec.setting, n, d);

  Table table(risk_curve_columns());
  auto add = [&](const char* kind, double t, McEstimate risk, McEstimate slope,
                 const std::string& status) {
    table.add_row({kSchemaVersion, std::string(kind), std::string(to_string(spec.setting)),
                   integer(n), integer(d), integer(spec.p), seed_cell(seed), t, risk.estimate,
                   risk.std_error, slope.estimate, slope.std_error, status});
  };
  auto emit = [&](auto&& risk_at, auto&& slope_at, auto&& locate) {
    for (double t : config.t_grid.points()) add("curve", t, risk_at(t), slope_at(t), "ok");
    try {
      const StoppingResult r = locate();
      add("t_opt", r.t_opt, risk_at(r.t_opt), slope_at(r.t_opt), "ok");
    } catch (const std::exception& e) {
      add("t_opt", kNaN, {kNaN, kNaN}, {kNaN, kNaN}, e.what());
    }
  };

  if (spec.setting == Setting::kOver) {
    const Spectrum s = eigen_spectrum(sample_gaussian_matrix(n, d, stream.split(0)),
                                      SpectrumMode::kValuesOnly);
    emit([&](double t) { return McEstimate{expected_risk_over(s, spec, t), 0.0}; },
         [&](double t) { return McEstimate{risk_derivative_over(s, spec, t), 0.0}; },
         [&] { return find_topt_over(s, spec); });
  } else {
    const UnderRiskModel model(spec, config.trials, stream.split(1), config.workers);
    emit([&](double t) { return model.risk(t); }, [&](double t) { return model.derivative(t); },
         [&] { return find_topt_under(model); });
  }
  return table;
}

//---------------------------------------------------------------------------//
// Bounds

std::vector<Column> bounds_columns() {
  using K = ColumnKind;
  return {{kSchemaColumn, K::kInteger},
          {"bound", K::kText},
          {"setting", K::kText},
          {"n", K::kInteger},
          {"d", K::kInteger},
          {"p", K::kInteger},
          {"sigma_sq", K::kReal},
          {"theta_norm_sq", K::kReal},
          {"gamma", K::kReal},
          {"t", K::kReal},
          {"lower", K::kReal},
          {"upper", K::kReal},
          {"lower_std_error", K::kReal},
          {"upper_std_error", K::kReal},
          {"hypothesis_satisfied", K::kBoolean},
          {"note", K::kText}};
}

Table run_bounds(const ExperimentConfig& config) {
  config.validate();
  Table table(bounds_columns());
  for (Index n : config.n_axis()) {
    for (Index d : config.d_axis()) {
      const ModelSpec spec = config.cell_spec(n, d);
      spec.validate();
      auto add = [&](const char* name, double gamma, double t, double lo, double hi, double lo_se,
                     double hi_se, bool ok, const std::string& note) {
        table.add_row({kSchemaVersion, std::string(name), std::string(to_string(spec.setting)),
                       integer(n), integer(d), integer(spec.p), spec.sigma_sq, spec.theta_norm_sq,
                       gamma, t, lo, hi, lo_se, hi_se, ok, note});
      };
      if (spec.setting == Setting::kOver) {
        if (n >= 2 && d >= 2) {
          const BoundInterval b = theorem1_bounds(spec);
          add("theorem1", b.gamma, kNaN, b.lower, b.upper, 0.0, 0.0, b.hypothesis_satisfied,
              b.hypothesis_note);
          const ConcentrationInterval c = concentration_interval(n, d);
          add("concentration", c.gamma, kNaN, c.lower, c.upper, 0.0, 0.0, c.hypothesis_satisfied,
              "failure probability " + std::to_string(c.failure_probability));
        }
        const Prop1Bounds r = prop1_risk_bounds(
            config.alpha, spec, config.trials,
            cell_stream(config.seeds.front(), spec.setting, n, d).split(2), config.workers);
        add("risk_at_t_bar", kNaN, r.t_bar, r.lower.estimate, r.upper.estimate,
            r.lower.std_error, r.upper.std_error, true,
            "alpha " + std::to_string(config.alpha));
      } else {
        const BoundInterval b = theorem2_bounds(spec);
        add("theorem2", kNaN, kNaN, b.lower, b.upper, 0.0, 0.0, b.hypothesis_satisfied,
            b.hypothesis_note);
        const Prop2Bounds r = prop2_risk_bounds(spec);
        add("risk_at_t_bar", kNaN, r.t_bar, r.lower, r.upper, 0.0, 0.0, r.hypothesis_satisfied,
            r.ratio_ok ? "lower >= 0.8 upper" : "lower < 0.8 upper");
      }
    }
  }
  return table;
}

//---------------------------------------------------------------------------//
// Asymptotics

std::vector<Column> asymptotic_columns() {
  using K = ColumnKind;
  return {{kSchemaColumn, K::kInteger},    {"row_kind", K::kText},
          {"gamma", K::kReal},             {"theta_norm_sq", K::kReal},
          {"sigma_sq", K::kReal},          {"rho", K::kReal},
          {"applicable", K::kBoolean},     {"decreasing_until", K::kReal},
          {"increasing_from", K::kReal},   {"increasing_until", K::kReal},
          {"t", K::kReal},                 {"derivative", K::kReal}};
}

Table run_asymptotic(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> gammas = config.gammas;
  if (gammas.empty())
    gammas.push_back(static_cast<double>(config.n) / static_cast<double>(config.d));
  const auto times = config.t_grid.points();

  std::vector<Table> parts(gammas.size(), Table(asymptotic_columns()));
  parallel_for(gammas.size(), config.workers, [&](std::size_t g) {
    const double gamma = gammas[g];
    Table& table = parts[g];
    const AsymptoticIntervals iv =
        asymptotic_intervals(gamma, config.theta_norm_sq, config.sigma_sq);
    auto add_set = [&](const char* kind, const IntervalSet& s) {
      table.add_row({kSchemaVersion, std::string(kind), gamma, config.theta_norm_sq,
                     config.sigma_sq, s.rho, s.applicable, s.decreasing_until, s.increasing_from,
                     s.increasing_until, kNaN, kNaN});
    };
    add_set("statement_rho", iv.primary);
    add_set("proof_rho", iv.proof_variant);
    if (iv.edge.active)
      table.add_row({kSchemaVersion, "edge_" + iv.edge.name, gamma, config.theta_norm_sq,
                     config.sigma_sq, kNaN, true, iv.edge.negative_until, iv.edge.positive_from,
                     kNaN, kNaN, kNaN});
    for (double t : times) {
      table.add_row({kSchemaVersion, std::string("derivative"), gamma, config.theta_norm_sq,
                     config.sigma_sq, kNaN, Cell{}, kNaN, kNaN, kNaN, t,
                     asymptotic_risk_derivative(gamma, config.theta_norm_sq, config.sigma_sq, t)});
    }
  });
  Table out(asymptotic_columns());
  for (const Table& t : parts) out.append(t);
  return out;
}

//---------------------------------------------------------------------------//
// Discretization

std::vector<Column> discretization_columns() {
  using K = ColumnKind;
  return {{kSchemaColumn, K::kInteger}, {"seed", K::kInteger},
          {"n", K::kInteger},           {"d", K::kInteger},
          {"p", K::kInteger},           {"step_size", K::kReal},
          {"steps", K::kInteger},       {"s_max", K::kReal},
          {"max_gap", K::kReal},        {"worst_step", K::kInteger},
          {"bound", K::kReal},          {"sharp_bound", K::kReal},
          {"bound_holds", K::kBoolean}, {"sharp_bound_holds", K::kBoolean},
          {"status", K::kText}};
}

Table run_discretization(const ExperimentConfig& config) {
  config.validate();
  ModelSpec spec = config.cell_spec(config.n_axis().front(), config.d_axis().front());
  spec.setting = Setting::kOver;
  spec.p = std::min(spec.p, spec.d);
  spec.validate();

  std::vector<std::vector<Cell>> rows(config.seeds.size());
  parallel_for(config.seeds.size(), config.workers, [&](std::size_t k) {
    const std::uint64_t seed = config.seeds[k];
    const RngStream stream = cell_stream(seed, Setting::kOver, spec.n, spec.d).split(3);
    const Matrix x = sample_gaussian_matrix(spec.n, spec.d, stream.split(0));
    const SemiOrthogonal proj = sample_haar_semi_orthogonal(
        spec.p, spec.d, Orientation::kRowOrthonormal, stream.split(1));
    CounterRng noise_rng(stream.split(2));
    const Vector y = x * (proj.entries.transpose() * spec.theta_star()) +
                     sample_gaussian_vector(spec.n, std::sqrt(spec.sigma_sq), noise_rng);
    const double s_max = largest_curvature(x);
    const double h = config.step_fraction / s_max;
    const DiscretizationGap gap = measure_discretization_gap(x, y, h, config.gd_steps);
    const double bound = discretization_bound(x, y, h);
    const double sharp = sharp_discretization_bound(x, y, h);
    rows[k] = {kSchemaVersion, seed_cell(seed), integer(spec.n), integer(spec.d), integer(spec.p),
               h, integer(config.gd_steps), s_max, gap.max_gap, integer(gap.worst_step), bound,
               sharp, gap.max_gap <= bound, gap.max_gap <= sharp, std::string("ok")};
  });
  Table table(discretization_columns());
  for (auto& r : rows) table.add_row(std::move(r));
  return table;
}

}  // namespace stoplab
