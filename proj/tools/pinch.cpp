// SPDX-License-Identifier: Apache-2.0
// Command-line runner: single optimizations, sweeps, field maps and oracle comparisons.
#include "pinch/experiments.hpp"
#include "pinch/field.hpp"
#include "pinch/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace pinch;

namespace {

enum Exit { kOk = 0, kOther = 1, kParse = 2, kInfeasible = 3, kNumerical = 4 };

struct Common {
  std::string scenario;
  std::uint64_t seed = 1;
  std::int64_t samples = -1;
  std::string s_grid;
  std::string out;
  bool desk = false;
  bool timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario, "Scenario JSON (default: built-in parameters)");
  app->add_option("--seed", c.seed, "Monte Carlo seed");
  app->add_option("--samples", c.samples, "Monte Carlo samples");
  app->add_option("--s-grid", c.s_grid, "Chernoff parameter grid lo:hi:n (log-spaced)");
  app->add_option("--out", c.out, "Output file (default: stdout)");
  app->add_flag("--desk", c.desk, "Desk profile: M = 6, N_T = 2, K = 2, T = 4");
  app->add_flag("--timing", c.timing, "Record wall-clock runtimes (output no longer reproducible)");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.scenario.empty() ? default_scenario() : load_scenario_file(c.scenario).config;
  if (c.desk) cfg = desk_profile(cfg);
  validate(cfg);
  return cfg;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) v.push_back(std::stod(part));
  if (v.size() != 3 || v[2] < 1 || v[2] != static_cast<int>(v[2]))
    throw CLI::ValidationError("--s-grid", "expected lo:hi:n");
  return log_grid(v[0], v[1], static_cast<int>(v[2]));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

DriverSettings settings_for(const Common& c, const ScenarioConfig& cfg, std::int64_t default_samples) {
  DriverSettings st;
  st.seed = c.seed;
  st.mc_samples = c.samples >= 0 ? c.samples : default_samples;
  st.s_grid = c.s_grid.empty() ? default_s_grid(cfg.snr_threshold) : parse_grid(c.s_grid);
  return st;
}

// Writes to --out or stdout.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write(f);
}

int run_cmd(const Common& c, const std::string& scheme) {
  const ScenarioConfig cfg = load(c);
  const BaselineRun run = run_baseline(cfg, {parse_scheme(scheme)}, settings_for(c, cfg, 100000));
  nlohmann::json j = to_json(run.solution, run.config);
  j["scheme"] = scheme;
  if (c.timing) j["runtime_s"] = run.solution.runtime_s;
  emit(c.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cerr << "scheme=" << scheme << " log_bound=" << run.solution.chernoff.log_bound
            << " mc_outage=" << run.solution.mc.p_hat << " std_err=" << run.solution.mc.std_err
            << " s=" << run.solution.s_star << '\n';
  return kOk;
}

int sweep_cmd(const Common& c, const std::string& sweep, const std::string& schemes) {
  const ScenarioConfig cfg = load(c);
  SweepSpec spec;
  spec.seed = c.seed;
  spec.samples = c.samples >= 0 ? c.samples : 10000;
  spec.timing = c.timing;
  if (sweep.empty()) {
    spec.parameter = "p_T";
    spec.values = desk_power_grid();
  } else {
    const auto eq = sweep.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--sweep", "expected PARAM=v1,v2,...");
    spec.parameter = sweep.substr(0, eq);
    for (const auto& v : split(sweep.substr(eq + 1), ',')) spec.values.push_back(v == "inf" ? kKappaInfinity : std::stod(v));
  }
  spec.schemes.clear();
  for (const auto& s : split(schemes, ',')) spec.schemes.push_back(parse_scheme(s));
  const auto rows = run_sweep(cfg, spec, settings_for(c, cfg, spec.samples));
  emit(c.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  return kOk;
}

int field_cmd(const Common& c, const std::string& solution, double res) {
  std::ifstream f(solution);
  if (!f) throw ScenarioError(ScenarioError::Kind::parse, "solution", "cannot open " + solution);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(ScenarioError::Kind::parse, "solution", e.what());
  }
  const ScenarioConfig cfg =
      c.scenario.empty() ? load_scenario(j.at("scenario").dump()).config : load(c);
  const Schedule sched = schedule_from_json(j.at("schedule"));
  emit(c.out, [&](std::ostream& os) { write_field_csv(os, field_map(cfg, sched, res)); });
  return kOk;
}

int oracle_cmd(const Common& c, int points, int tau_points) {
  const ScenarioConfig cfg = load(c);
  OracleBudget b;
  b.position_points = points;
  b.tau_points = tau_points;
  const auto grid = c.s_grid.empty() ? default_s_grid(cfg.snr_threshold) : parse_grid(c.s_grid);
  const OracleResult r = enumerate(cfg, b, grid, c.samples >= 0 ? c.samples : 100000, c.seed);
  emit(c.out, [&](std::ostream& os) { write_oracle_csv(os, r); });
  if (!r.feasible) throw InfeasibleError("oracle: no candidate meets every constraint");
  std::cerr << "best_chernoff log_bound=" << r.best_chernoff.log_bound << " mc=" << r.best_chernoff.mc.p_hat
            << "\nbest_mc mc=" << r.best_mc.mc.p_hat << " log_bound=" << r.best_mc.log_bound << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered pinching-antenna ISAC outage optimizer"};
  app.require_subcommand(1);
  Common c;

  std::string scheme = "proposed";
  auto* run = app.add_subcommand("run", "Optimize one scenario and write the solution JSON");
  add_common(run, c);
  run->add_option("--scheme", scheme, "proposed, fixed_ula, same_cluster, equal_slots, single_antenna, "
                                      "target_aligned, uniform");

  std::string sweep, schemes = "proposed";
  auto* sw = app.add_subcommand("sweep", "Sweep one parameter over one or more schemes, CSV output");
  add_common(sw, c);
  sw->add_option("--sweep", sweep, "PARAM=v1,v2,... with PARAM in p_T, kappa, R_min, N_T, T (default: desk powers)");
  sw->add_option("--scheme", schemes, "Comma-separated scheme names");

  std::string solution;
  double res = 0.1;
  auto* fd = app.add_subcommand("field", "Normalized radiated power map per slot, CSV output");
  add_common(fd, c);
  fd->add_option("--solution", solution, "Solution JSON written by run")->required();
  fd->add_option("--field-res", res, "Grid resolution in meters");

  int points = 5, tau_points = 5;
  auto* orc = app.add_subcommand("oracle", "Exhaustive search on a tiny instance, CSV output");
  add_common(orc, c);
  orc->add_option("--points", points, "Position grid points per antenna (<= 7)");
  orc->add_option("--tau-points", tau_points, "Duration grid points (<= 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;
  }

  try {
    if (*run) return run_cmd(c, scheme);
    if (*sw) return sweep_cmd(c, sweep, schemes);
    if (*fd) return field_cmd(c, solution, res);
    if (*orc) return oracle_cmd(c, points, tau_points);
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kParse;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return kParse;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const OracleBudgetError& e) {
    std::cerr << e.what() << '\n';
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
