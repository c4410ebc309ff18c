// SPDX-License-Identifier: Apache-2.0
// User scheduling block: big-M relaxation with exponential-cone rate constraints.
#pragma once

#include "pinch/conic.hpp"
#include "pinch/schedule.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pinch {

struct Sp2bOptions {
  double eps = 1e-3;
  int max_inner = 30;
  double rho2 = 1.0;            // u never enters the sensing objective, so this only scales the program
  double integrality_tol = 1e-6;
  // true: cap rho_tilde by 2^{R_min} - 1. This caps every served slot at R_min bps/Hz, so a user
  // served in fewer than all slots can never reach R_min.
  bool printed_rho_max = false;
  // true: per-slot rate u log(1 + rho_tilde / u), the tight form of the big-M rows; equal at integral u.
  // false: log(1 + rho_tilde), which lets a vanishing u still carry a sizeable rate.
  bool perspective = true;
  bool repair = true;           // slot-reassignment search when the projected schedule misses a rate
  conic::Settings solver;
};

// Per (k, t) caps used by the big-M constraints.
struct Sp2bBounds {
  Eigen::MatrixXd gamma;    // exact SNR gamma_k(t) at the fixed positions
  Eigen::MatrixXd cap;      // upper bound of rho_k(t)
  Eigen::VectorXd rho_max;  // per user big-M constant
  Eigen::VectorXd weight;   // tau(t) / T_max
};
Sp2bBounds sp2b_bounds(const ScenarioConfig& cfg, const Schedule& sched, const Sp2bOptions& options = {});

struct Sp2bProgram {
  conic::Program program;
  std::vector<int> u;          // index k + K * t
  std::vector<int> rho;        // normalized by rho_max(k)
  std::vector<int> rho_tilde;  // normalized by rho_max(k)
  std::vector<int> log_rate;   // natural-log rate per (k, t), times u in the perspective form
};

// u_l is the expansion point of the scheduling penalty.
Sp2bProgram build_sp2b(const ScenarioConfig& cfg, const Sp2bBounds& bounds, const Eigen::MatrixXd& u_l,
                       const Sp2bOptions& options = {});

// u - u^2 summed over entries.
double scheduling_penalty(const Eigen::MatrixXd& u);

// Per slot: the largest entry if it exceeds 0.5, else nobody; ties go to the lower user index.
Eigen::MatrixXd project_schedule(const Eigen::MatrixXd& u);

struct Sp2bResult {
  Eigen::MatrixXd u;
  Eigen::MatrixXd rho;   // gamma * u at the returned schedule
  std::vector<double> trace;  // penalized objective per inner step
  bool feasible = false;
  bool unchanged = false;     // the input was integral and feasible
  bool repaired = false;
  std::string message;
};

Sp2bResult solve_sp2b(const ScenarioConfig& cfg, const Schedule& sched, const Sp2bOptions& options = {});

}  // namespace pinch
