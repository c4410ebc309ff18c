// SPDX-License-Identifier: Apache-2.0
// Decision variables shared by the subproblems and their direct evaluation.
#pragma once

#include "pinch/channel.hpp"
#include "pinch/rcs.hpp"
#include "pinch/scenario.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pinch {

struct Schedule {
  Eigen::MatrixXd b;    // M x T cluster selection
  Eigen::VectorXd tau;  // T slot durations in seconds
  Eigen::MatrixXd u;    // K x T user scheduling
  SlotLayouts layouts;  // antenna positions per slot, every cluster
};

// Round-robin clusters and users, equal slots, uniform positions.
Schedule initial_schedule(const ScenarioConfig& cfg);

// User index served in slot t, or -1.
int served_user(const Eigen::MatrixXd& u, int t, double tol = 1e-9);

// Exact communication SNR gamma_k(t) for the active cluster of slot t (K x T).
Eigen::MatrixXd slot_snr(const ScenarioConfig& cfg, const Schedule& sched);
// Average rates sum_t tau/T_max u log2(1 + gamma).
Eigen::VectorXd user_rates(const ScenarioConfig& cfg, const Schedule& sched);

SensingWeights schedule_weights(const ScenarioConfig& cfg, const Schedule& sched);
RcsModel scenario_rcs(const ScenarioConfig& cfg);

// Empty when every P0 constraint holds; otherwise a description of the first violation.
std::string constraint_violation(const ScenarioConfig& cfg, const Schedule& sched, double tol = 1e-7);

}  // namespace pinch
