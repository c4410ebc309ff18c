// SPDX-License-Identifier: Apache-2.0
// Cluster selection and slot-duration optimization.
#pragma once

#include "pinch/conic.hpp"
#include "pinch/outage.hpp"
#include "pinch/schedule.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace pinch {

struct Sp1Options {
  double eps = 1e-3;
  int max_inner = 30;
  double rho_start = 0.0;  // <= 0 selects 1e-2 * (1 + |F|)
  double rho_max = 1e6;
  double integrality_tol = 1e-6;
  bool same_cluster = false;  // b_m(t) = b_m(0)
  bool fixed_tau = false;     // keep tau at its initial value
  bool exact_logdet = true;   // false: linearized log-det with an exact line search
  bool local_search = true;   // single-slot cluster switches after projection
  conic::Settings solver;
};

// Per-slot sensing gains |sum_n h_e|^2 (M x T) and rates log2(1 + gamma_{k,m}(t)) per user.
struct Sp1Tables {
  Eigen::MatrixXd gain;
  std::vector<Eigen::MatrixXd> rate;
  double psi = 0.0;
};
Sp1Tables sp1_tables(const ScenarioConfig& cfg, const SlotLayouts& layouts);

// g_m = s [(I + s R Q)^{-1} R]_mm.
Eigen::VectorXd logdet_gradient(const Eigen::VectorXd& q, const Eigen::MatrixXd& R, double s);

// Smooth convex term s*gamma_th - logdet(I + s R diag(q)) with q_m given as affine expressions.
conic::SmoothTerm chernoff_term(const RcsModel& model, double gamma_th, double s, const std::vector<conic::Affine>& q,
                                int num_variables);

struct Sp1Program {
  conic::Program program;
  std::vector<conic::Affine> b;  // M*T entries, index m + M*t (scaled to [0, 1])
  std::vector<conic::Affine> tau;  // tau / T_max
  std::vector<conic::Affine> p;    // p / T_max
  std::vector<conic::Affine> q;
};

// b_l and tau_l are the expansion point; fixed_b freezes the selection.
Sp1Program build_sp1(const ScenarioConfig& cfg, const Sp1Tables& tables, const Eigen::MatrixXd& u,
                     const Eigen::MatrixXd& b_l, const Eigen::VectorXd& tau_l, const RcsModel& model, double s,
                     double rho, const Sp1Options& options, bool fixed_b);

struct Sp1Result {
  Eigen::MatrixXd b;
  Eigen::VectorXd tau;
  std::vector<double> trace;      // penalized objective per inner step
  std::vector<double> rho_trace;  // penalty in force for each trace entry
  double objective = 0.0;         // exact surrogate after projection and polish
  bool feasible = false;
  bool integral_before_projection = false;
  bool kept_incumbent = false;
  std::string message;
};

Sp1Result solve_sp1(const ScenarioConfig& cfg, const SlotLayouts& layouts, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& b_init, const Eigen::VectorXd& tau_init, const RcsModel& model, double s,
                    const Sp1Options& options = {});

}  // namespace pinch
