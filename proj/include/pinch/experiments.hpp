// SPDX-License-Identifier: Apache-2.0
// Parameter sweeps over schemes with CSV output.
#pragma once

#include "pinch/baselines.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinch {

// kappa proxy for an infinitely fast decorrelating RCS.
constexpr double kKappaInfinity = 1e6;

// Swept parameter names: p_T, kappa, R_min, N_T, T.
void apply_parameter(ScenarioConfig& cfg, const std::string& name, double value);

// M = 6, N_T = 2, K = 2, T = 4 over the given scenario.
ScenarioConfig desk_profile(ScenarioConfig cfg);
// Eight log-spaced transmit powers for the desk profile, W.
std::vector<double> desk_power_grid();

struct SweepSpec {
  std::string parameter = "p_T";
  std::vector<double> values;
  std::vector<Scheme> schemes{Scheme::proposed};
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  bool timing = false;  // false writes runtime_s = 0 so the CSV is reproducible
};

struct SweepRow {
  Scheme scheme = Scheme::proposed;
  std::string parameter;
  double value = 0.0;
  double chernoff_bound = 1.0;
  double mc_outage = 1.0;
  double mc_stderr = 0.0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

// Rows ordered by scheme then value, in the order given. Failures are recorded in status.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, const DriverSettings& settings);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace pinch
