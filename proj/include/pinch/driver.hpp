// SPDX-License-Identifier: Apache-2.0
// Outer grid over the Chernoff parameter with alternating optimization of the three blocks.
#pragma once

#include "pinch/outage.hpp"
#include "pinch/schedule.hpp"
#include "pinch/sp1.hpp"
#include "pinch/sp2a.hpp"
#include "pinch/sp2b.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinch {

// No s-candidate produced a schedule meeting every constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver breakdown that left no usable candidate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriverSettings {
  std::vector<double> s_grid;  // empty: default_s_grid(Gamma_th)
  double eps = 1e-3;
  int max_outer = 30;
  std::uint64_t seed = 1;
  std::int64_t mc_samples = 100000;  // final evaluation, 0 skips it
  bool select_by_mc = false;         // pick the s-candidate by MC outage instead of the surrogate
  std::int64_t select_mc_samples = 10000;
  bool optimize_positions = true;    // false freezes the layout (sp2a skipped)
  std::optional<AntennaLayout> initial_layout;  // default: uniform in every aperture
  double monotone_slack = 1e-6;      // relative slack of the per-s surrogate trace
  int allowed_increases = 2;         // projection steps that may raise the surrogate
  Sp1Options sp1;
  Sp2aOptions sp2a;
  Sp2bOptions sp2b;
};

struct TracePoint {
  int iteration = 0;
  std::string block;  // init, sp1, sp2a, sp2b
  double value = 0.0;
};

struct Candidate {
  double s = 0.0;
  std::string status = "ok";  // ok, infeasible, aborted, failed
  std::string message;
  double surrogate = 0.0;     // F(s) at the final schedule
  int iterations = 0;
  std::vector<TracePoint> trace;
  std::vector<std::string> warnings;
  Schedule schedule;
  double mc_outage = -1.0;    // only when select_by_mc
};

struct SolutionBundle {
  Schedule schedule;
  Eigen::MatrixXd rho;        // gamma * u at the schedule
  Eigen::VectorXd q;
  double s_star = 0.0;        // grid candidate that was selected
  double surrogate = 0.0;     // F(s_star)
  ChernoffResult chernoff;    // bound of the final Q minimized over s
  OutageEstimate mc;
  std::vector<Candidate> candidates;
  std::vector<std::string> warnings;
  double runtime_s = 0.0;     // excluded from the JSON dump
};

SolutionBundle optimize(const ScenarioConfig& cfg, const DriverSettings& settings = {});

// One s-candidate; exposed for tests.
Candidate optimize_at(const ScenarioConfig& cfg, const RcsModel& model, double s, const DriverSettings& settings);

nlohmann::json to_json(const Schedule& sched);
nlohmann::json to_json(const SolutionBundle& sol, const ScenarioConfig& cfg);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace pinch
