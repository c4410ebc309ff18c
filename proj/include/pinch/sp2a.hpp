// SPDX-License-Identifier: Apache-2.0
// Antenna positioning and beam-matrix block: lifted SDP solved by majorize-minimize steps.
#pragma once

#include "pinch/conic.hpp"
#include "pinch/rcs.hpp"
#include "pinch/schedule.hpp"

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace pinch {

// Node o of a slot program: the target (index 0) or the served user.
struct NodeBeam {
  Point2 pos;
  int user = -1;              // -1 for the target
  Eigen::MatrixXd F;          // distance-coded, Diag = 1/d^2
  Eigen::MatrixXcd A;         // unit-modulus phase matrix
  Eigen::VectorXd theta;      // total phase per antenna, radians
};

struct SlotBeam {
  int slot = 0;
  int cluster = 0;
  Eigen::VectorXd x;          // positions of the active cluster
  Eigen::VectorXd c;          // eta * exp(-alpha * l) frozen at x
  std::vector<NodeBeam> nodes;
};

struct BeamState {
  std::vector<SlotBeam> slots;
  double rho1 = 1e2;
  double last_phase_residual = -1.0;
  std::vector<std::string> warnings;
};

// Consistent rank-one point for positions x of cluster m in slot t; user < 0 skips the user node.
SlotBeam consistent_beam(const ScenarioConfig& cfg, int slot, int cluster, const Eigen::VectorXd& x, int user);

// Tangent line value + slope * (v - point).
struct Tangent {
  double point = 0.0;
  double value = 0.0;
  double slope = 0.0;
  double operator()(double v) const { return value + slope * (v - point); }
};

// Quadratic upper model of |a - exp(-j th)|^2 in (Re a, Im a, th).
struct PhaseMajorizer {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double value = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  Eigen::Vector3d lipschitz{4.0, 4.0, 4.0};
  double operator()(const Eigen::Vector3d& v) const;
};
double phase_penalty(const Eigen::Vector3d& v);
Eigen::Vector3d phase_penalty_gradient(const Eigen::Vector3d& v);

struct NodeSurrogates {
  std::vector<Tangent> x_aff;     // minorant of (x - x_o)^2
  std::vector<Tangent> z_aff;     // minorant of 1/z at z = Diag(F)
  std::vector<Tangent> zbar_aff;  // minorant of (2 pi / lambda) z^{-1/2}
  Eigen::MatrixXcd S;             // F + C A C at the expansion point
  Eigen::VectorXd f_vec;          // principal eigenvector of F
  Eigen::VectorXcd a_vec;         // principal eigenvector of A
  std::vector<PhaseMajorizer> phase;  // entries 1..N-1 of the first column
  // ||F + C A C||_F^2 linearized at S, with C frozen.
  double frob_lin(const Eigen::MatrixXd& F, const Eigen::MatrixXcd& A, const Eigen::VectorXd& c) const;
  double spec_lin(const Eigen::MatrixXd& F) const { return f_vec.dot(F * f_vec); }
  double spec_lin(const Eigen::MatrixXcd& A) const { return (a_vec.adjoint() * A * a_vec)(0, 0).real(); }
};

struct Surrogates {
  std::vector<NodeSurrogates> nodes;
};

Surrogates mm_surrogates(const ScenarioConfig& cfg, const SlotBeam& beam,
                         const Eigen::Vector3d& lipschitz = Eigen::Vector3d(4.0, 4.0, 4.0));

// Coefficient relating the Frobenius split to the SNR floor.
//  consistent: 2 N_T sigma^2 / p_T (matches the 1/sqrt(N_T) channel normalization)
//  derivation: 2 sigma^2 / p_T
//  printed:    N_T sigma^2 / p_T
enum class SnrCoefficient { consistent, derivation, printed };

struct Sp2aOptions {
  double rho1_start = 1e2;
  double rho1_growth = 5.0;
  double rho1_max = 1e6;
  double phase_tol = 1e-3;         // per-entry phase residual before the penalty grows
  double slack_weight = 1e2;       // weight of the distance/phase coupling slacks
  Eigen::Vector3d phase_lipschitz{4.0, 4.0, 4.0};
  SnrCoefficient snr_coefficient = SnrCoefficient::consistent;
  bool attenuation_term = true;    // first-order x-dependence of exp(-alpha l)
  std::vector<double> line_search{1.0, 0.5, 0.25, 0.125, 0.0625};
  double projection_warning = 0.1;
  // Exact coordinate search on the slot gain after the MM step (false: MM step only).
  bool polish = true;
  int polish_sweeps = 3;
  double polish_resolution = 1.0 / 40.0;  // grid step in wavelengths
  bool polish_inactive = true;             // also search the clusters that are idle in a slot
  conic::Settings solver;
};

// Everything outside the slot that the slot program needs.
struct SlotContext {
  Eigen::VectorXd q_rest;   // sensing weights with this slot's contribution removed
  double weight = 0.0;      // tau(t) / T_max
  double rate_floor = 0.0;  // required rate share of the served user in this slot, bps/Hz
};

struct Sp2aProgram {
  conic::Program program;
  std::vector<int> xi;          // position offsets in wavelengths
  std::vector<int> g;           // per node, lower model of the normalized gain
  std::vector<conic::SymmetricVar> F;   // normalized by phi
  std::vector<conic::HermitianVar> A;
  std::vector<std::vector<int>> dtheta;
  std::vector<double> phi;      // F = phi * F_hat
  std::vector<double> gain_scale;  // true |sum c f a|^2 = gain_scale * g
  int rho = -1;                 // normalized SNR of the served user
  Eigen::VectorXd expansion;    // variable values at the consistent expansion point
  double surrogate_at_point = 0.0;
};

Sp2aProgram build_sp2a(const ScenarioConfig& cfg, const SlotBeam& beam, const SlotContext& ctx,
                       const RcsModel& model, double s, double rho1, const Sp2aOptions& options = {});

// Rank-one projection through the principal eigenpair, trace preserved. residual = 1 - lambda_max / trace.
Eigen::MatrixXcd rank_one_projection(const Eigen::MatrixXcd& Y, double* residual = nullptr);
Eigen::MatrixXd rank_one_projection(const Eigen::MatrixXd& Y, double* residual = nullptr);

struct Sp2aSlotReport {
  int slot = 0;
  double surrogate_before = 0.0;  // penalized surrogate at the expansion point
  double surrogate_after = 0.0;   // penalized surrogate at the solver output
  double objective_before = 0.0;  // exact F
  double objective_after = 0.0;
  double step = 0.0;              // accepted line-search factor, 0 when rejected
  double objective_mm = 0.0;      // exact F after the MM step, before the polish
  double phase_residual = 0.0;
  double rank_residual = 0.0;
  conic::Status status = conic::Status::optimal;
  std::string diagnostics;
};

struct Sp2aResult {
  SlotLayouts layouts;
  BeamState state;
  std::vector<Sp2aSlotReport> slots;
  double objective = 0.0;  // exact F after the step
};

// Exact F(s) of a schedule.
double schedule_objective(const ScenarioConfig& cfg, const Schedule& sched, const RcsModel& model, double s);

BeamState initial_beam_state(const ScenarioConfig& cfg, const Schedule& sched, const Sp2aOptions& options = {});

// Coordinate-wise maximization of the sensing gain of cluster positions x; each coordinate is searched
// over its whole feasible interval. When user >= 0 the user's SNR must stay >= snr_floor.
Eigen::VectorXd polish_positions(const ScenarioConfig& cfg, int cluster, Eigen::VectorXd x, int user, double snr_floor,
                                 int sweeps, double resolution);

// One majorize-minimize pass over the slots (Gauss-Seidel order); b, tau, u stay fixed.
Sp2aResult step_sp2a(const ScenarioConfig& cfg, const Schedule& sched, const RcsModel& model, double s,
                     const BeamState& state, const Sp2aOptions& options = {});

}  // namespace pinch
