// SPDX-License-Identifier: Apache-2.0
// Reference schemes: the proposed design with some variables frozen.
#pragma once

#include "pinch/driver.hpp"

#include <string>
#include <vector>

namespace pinch {

enum class Scheme { proposed, fixed_ula, same_cluster, equal_slots, single_antenna, target_aligned, uniform };

const char* to_string(Scheme s);
// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(const std::string& name);
std::vector<Scheme> all_schemes();

struct BaselineSpec {
  Scheme kind = Scheme::proposed;
  double ula_center = 5.0;  // x of the conventional array's center
};

// Scenario actually simulated by the scheme (the array and single-antenna cases change the geometry).
ScenarioConfig baseline_config(const ScenarioConfig& cfg, const BaselineSpec& spec);
// Driver settings with the scheme's freezes applied; cfg must come from baseline_config.
DriverSettings baseline_settings(const ScenarioConfig& cfg, const BaselineSpec& spec, DriverSettings settings);

// Half-wavelength array split into M contiguous subarrays of N_T elements.
AntennaLayout ula_layout(const ScenarioConfig& cfg);
// Per cluster: first antenna at its uniform position, each next one at the leftmost feasible point with the
// smallest wrapped gap between its target phase and the first antenna's.
AntennaLayout target_aligned_layout(const ScenarioConfig& cfg);
// Wrapped phase of exp(-j(k_g l + k d)) toward the target, in (-pi, pi].
double target_phase(const ScenarioConfig& cfg, double x);

struct BaselineRun {
  ScenarioConfig config;
  SolutionBundle solution;
};

BaselineRun run_baseline(const ScenarioConfig& cfg, const BaselineSpec& spec, const DriverSettings& settings = {});

}  // namespace pinch
