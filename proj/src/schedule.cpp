// SPDX-License-Identifier: Apache-2.0
#include "pinch/schedule.hpp"

#include <cmath>
#include <sstream>

namespace pinch {

Schedule initial_schedule(const ScenarioConfig& cfg) {
  const int M = cfg.num_clusters, T = cfg.num_slots, K = cfg.num_users;
  Schedule s;
  s.b = Eigen::MatrixXd::Zero(M, T);
  s.u = Eigen::MatrixXd::Zero(K, T);
  for (int t = 0; t < T; ++t) {
    s.b(t % M, t) = 1.0;
    if (K > 0) s.u(t % K, t) = 1.0;
  }
  s.tau = Eigen::VectorXd::Constant(T, cfg.total_time / T);
  s.layouts.assign(T, uniform_layout(cfg));
  return s;
}

int served_user(const Eigen::MatrixXd& u, int t, double tol) {
  for (int k = 0; k < u.rows(); ++k)
    if (u(k, t) > 1.0 - tol) return k;
  return -1;
}

Eigen::MatrixXd slot_snr(const ScenarioConfig& cfg, const Schedule& sched) {
  const auto act = active_clusters(sched.b);
  Eigen::MatrixXd g(cfg.num_users, sched.tau.size());
  for (int t = 0; t < sched.tau.size(); ++t)
    for (int k = 0; k < cfg.num_users; ++k) g(k, t) = comm_snr(cfg, sched.layouts.at(t), act[t], k);
  return g;
}

Eigen::VectorXd user_rates(const ScenarioConfig& cfg, const Schedule& sched) {
  const Eigen::MatrixXd g = slot_snr(cfg, sched);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(cfg.num_users);
  for (int t = 0; t < sched.tau.size(); ++t)
    for (int k = 0; k < cfg.num_users; ++k)
      r[k] += sched.tau[t] / cfg.total_time * sched.u(k, t) * std::log2(1.0 + g(k, t));
  return r;
}

SensingWeights schedule_weights(const ScenarioConfig& cfg, const Schedule& sched) {
  return sensing_weights(cfg, sched.layouts, sched.b, sched.tau);
}

RcsModel scenario_rcs(const ScenarioConfig& cfg) {
  Eigen::VectorXd angles(cfg.num_clusters);
  for (int m = 0; m < cfg.num_clusters; ++m) angles[m] = look_angle(cfg, m);
  return build_covariance(angles, cfg.rcs_mean, cfg.rcs_decay);
}

std::string constraint_violation(const ScenarioConfig& cfg, const Schedule& sched, double tol) {
  std::ostringstream os;
  const int T = cfg.num_slots;
  if (sched.b.rows() != cfg.num_clusters || sched.b.cols() != T || sched.tau.size() != T ||
      sched.u.rows() != cfg.num_users || sched.u.cols() != T || static_cast<int>(sched.layouts.size()) != T)
    return "dimension mismatch";
  try {
    active_clusters(sched.b, 1e-9);
  } catch (const std::exception& e) {
    return std::string("C2/C4: ") + e.what();
  }
  for (int t = 0; t < T; ++t) {
    double col = 0.0;
    for (int k = 0; k < cfg.num_users; ++k) {
      const double v = sched.u(k, t);
      if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9) return "C5: u not binary";
      col += v;
    }
    if (col > 1.0 + 1e-9) return "C6: more than one user in slot " + std::to_string(t);
    if (sched.tau[t] < cfg.min_slot * (1.0 - tol)) return "C3: slot " + std::to_string(t) + " below T_min";
  }
  if (sched.tau.sum() > cfg.total_time * (1.0 + tol)) return "C3: total time exceeded";
  const Eigen::VectorXd r = user_rates(cfg, sched);
  for (int k = 0; k < cfg.num_users; ++k)
    if (r[k] < cfg.rate_min * (1.0 - tol) - tol) {
      os << "C1: user " << k << " rate " << r[k] << " < " << cfg.rate_min;
      return os.str();
    }
  for (int t = 0; t < T; ++t) {
    try {
      check_layout(cfg, sched.layouts[t], 1e-9);
    } catch (const std::exception& e) {
      return std::string("C7: slot ") + std::to_string(t) + ": " + e.what();
    }
  }
  return {};
}

}  // namespace pinch
