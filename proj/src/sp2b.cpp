// SPDX-License-Identifier: Apache-2.0
#include "pinch/sp2b.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pinch {

using conic::Affine;

namespace {

Eigen::VectorXd rates_of(const Sp2bBounds& bd, const Eigen::MatrixXd& u) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(u.rows());
  for (int t = 0; t < u.cols(); ++t)
    for (int k = 0; k < u.rows(); ++k) r[k] += bd.weight[t] * u(k, t) * std::log2(1.0 + bd.gamma(k, t));
  return r;
}

bool rates_ok(const ScenarioConfig& cfg, const Eigen::VectorXd& r) {
  const double tol = 1e-7;
  for (int k = 0; k < r.size(); ++k)
    if (r[k] < cfg.rate_min * (1.0 - tol) - tol) return false;
  return true;
}

bool integral(const Eigen::MatrixXd& u, double tol) {
  for (int i = 0; i < u.size(); ++i) {
    const double v = u.data()[i];
    if (std::min(std::abs(v), std::abs(1.0 - v)) > tol) return false;
  }
  return true;
}

// Schedule from a per-slot assignment (-1 = nobody).
Eigen::MatrixXd from_assignment(const std::vector<int>& a, int K) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(K, static_cast<int>(a.size()));
  for (size_t t = 0; t < a.size(); ++t)
    if (a[t] >= 0) u(a[t], static_cast<int>(t)) = 1.0;
  return u;
}

std::vector<int> to_assignment(const Eigen::MatrixXd& u) {
  std::vector<int> a(u.cols(), -1);
  for (int t = 0; t < u.cols(); ++t)
    for (int k = 0; k < u.rows(); ++k)
      if (u(k, t) > 0.5) a[t] = k;
  return a;
}

double worst_margin(const ScenarioConfig& cfg, const Eigen::VectorXd& r) {
  return r.size() ? (r.array() - cfg.rate_min).minCoeff() : 0.0;
}

// Feasible integral schedule closest to u in Hamming distance; exhaustive when small, greedy otherwise.
bool repair_schedule(const ScenarioConfig& cfg, const Sp2bBounds& bd, Eigen::MatrixXd& u) {
  const int K = static_cast<int>(u.rows()), T = static_cast<int>(u.cols());
  const std::vector<int> start = to_assignment(u);
  double count = 1.0;
  for (int t = 0; t < T; ++t) count *= K + 1;
  if (count <= 65536.0) {
    std::vector<int> a(T, -1), best;
    int best_dist = T + 1;
    for (;;) {
      const Eigen::MatrixXd cand = from_assignment(a, K);
      if (rates_ok(cfg, rates_of(bd, cand))) {
        int dist = 0;
        for (int t = 0; t < T; ++t) dist += a[t] != start[t];
        if (dist < best_dist) best_dist = dist, best = a;
      }
      int t = 0;
      while (t < T && ++a[t] == K) a[t++] = -1;
      if (t == T) break;
    }
    if (best.empty()) return false;
    u = from_assignment(best, K);
    return true;
  }
  std::vector<int> a = start;
  double score = worst_margin(cfg, rates_of(bd, from_assignment(a, K)));
  for (int pass = 0; pass < 4 * T && score < 0.0; ++pass) {
    bool improved = false;
    for (int t = 0; t < T; ++t)
      for (int k = -1; k < K; ++k) {
        if (k == a[t]) continue;
        std::vector<int> b = a;
        b[t] = k;
        const double sc = worst_margin(cfg, rates_of(bd, from_assignment(b, K)));
        if (sc > score + 1e-12) score = sc, a = b, improved = true;
      }
    if (!improved) break;
  }
  u = from_assignment(a, K);
  return rates_ok(cfg, rates_of(bd, u));
}

}  // namespace

Sp2bBounds sp2b_bounds(const ScenarioConfig& cfg, const Schedule& sched, const Sp2bOptions& opt) {
  const int K = cfg.num_users, T = static_cast<int>(sched.tau.size());
  Sp2bBounds bd;
  bd.gamma = slot_snr(cfg, sched);
  bd.weight = sched.tau / cfg.total_time;
  bd.cap = Eigen::MatrixXd::Zero(K, T);
  bd.rho_max = Eigen::VectorXd::Zero(K);
  const double printed = std::exp2(cfg.rate_min) - 1.0;
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < T; ++t) {
      if (bd.weight[t] <= 0.0) continue;
      // Serving k alone in slot t at this SNR already meets the requirement, so larger rho changes nothing.
      const double enough = std::exp2(std::min(cfg.rate_min / bd.weight[t], 1000.0)) - 1.0;
      double c = std::min(bd.gamma(k, t), enough);
      if (opt.printed_rho_max) c = std::min(c, printed);
      bd.cap(k, t) = c;
    }
    bd.rho_max[k] = opt.printed_rho_max ? printed : bd.cap.row(k).maxCoeff();
  }
  return bd;
}

double scheduling_penalty(const Eigen::MatrixXd& u) { return (u.array() - u.array().square()).sum(); }

Eigen::MatrixXd project_schedule(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(u.rows(), u.cols());
  for (int t = 0; t < u.cols(); ++t) {
    int best = 0;
    for (int k = 1; k < u.rows(); ++k)
      if (u(k, t) > u(best, t)) best = k;
    if (u.rows() > 0 && u(best, t) > 0.5) p(best, t) = 1.0;
  }
  return p;
}

Sp2bProgram build_sp2b(const ScenarioConfig& cfg, const Sp2bBounds& bd, const Eigen::MatrixXd& u_l,
                       const Sp2bOptions& opt) {
  const int K = cfg.num_users, T = static_cast<int>(bd.weight.size());
  Sp2bProgram sp;
  auto& P = sp.program;
  Affine obj = 0.0;
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) {
      const int u = P.add_variable(0.0, 1.0, "u");
      sp.u.push_back(u);
      // Tangent majorizer of u - u^2.
      obj += Affine::var(u, opt.rho2 * (1.0 - 2.0 * u_l(k, t)));
      obj += opt.rho2 * u_l(k, t) * u_l(k, t);
    }
  for (int t = 0; t < T; ++t) {
    Affine col = 0.0;
    for (int k = 0; k < K; ++k) col += P.var(sp.u[k + K * t]);
    P.add_leq(col, 1.0);
  }
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) {
      const double rm = bd.rho_max[k];
      const double hi = rm > 0.0 ? bd.cap(k, t) / rm : 0.0;
      const int rho = P.add_variable(0.0, std::max(hi, 0.0), "rho");
      const int rt = P.add_variable(0.0, 1.0, "rho_tilde");
      sp.rho.push_back(rho);
      sp.rho_tilde.push_back(rt);
      const Affine u = P.var(sp.u[k + K * t]);
      P.add_leq(P.var(rt), P.var(rho));
      P.add_leq(P.var(rt), u);
      P.add_leq(P.var(rho) - (1.0 - u), P.var(rt));
      const int lr = P.add_variable(0.0, std::log1p(std::max(rm, 0.0)) + 1.0, "log_rate");
      sp.log_rate.push_back(lr);
      if (opt.perspective)
        // u exp(log_rate / u) <= u + rho_tilde: the rate counts only in proportion to u.
        P.add_exp(P.var(lr), u, u + rm * P.var(rt));
      else
        // exp(log_rate) <= 1 + rho_tilde
        P.add_exp(P.var(lr), 1.0, 1.0 + rm * P.var(rt));
    }
  if (cfg.rate_min > 0.0)
    for (int k = 0; k < K; ++k) {
      Affine r = 0.0;
      for (int t = 0; t < T; ++t) r += P.var(sp.log_rate[k + K * t]) * (bd.weight[t] / std::log(2.0));
      P.add_leq(cfg.rate_min, r);
    }
  P.minimize(obj);
  return sp;
}

Sp2bResult solve_sp2b(const ScenarioConfig& cfg, const Schedule& sched, const Sp2bOptions& opt) {
  const int K = cfg.num_users, T = static_cast<int>(sched.tau.size());
  const Sp2bBounds bd = sp2b_bounds(cfg, sched, opt);
  Sp2bResult res;
  auto finish = [&](const Eigen::MatrixXd& u) {
    res.u = u;
    res.rho = bd.gamma.cwiseProduct(u);
    res.feasible = rates_ok(cfg, rates_of(bd, u));
    if (!res.feasible) {
      const Eigen::VectorXd r = rates_of(bd, u);
      int worst = 0;
      for (int k = 1; k < K; ++k)
        if (r[k] - cfg.rate_min < r[worst] - cfg.rate_min) worst = k;
      std::ostringstream os;
      os << "user " << worst << " cannot reach R_min = " << cfg.rate_min << " (rate " << r[worst]
         << " bps/Hz) under the current positions and slot durations";
      if (!res.message.empty()) os << "; " << res.message;
      res.message = os.str();
    }
    return res;
  };

  Eigen::MatrixXd u = sched.u;
  if (integral(u, opt.integrality_tol) && rates_ok(cfg, rates_of(bd, u))) {
    bool c6 = true;
    for (int t = 0; t < T; ++t) c6 = c6 && u.col(t).sum() <= 1.0 + 1e-9;
    if (c6) {
      res.unchanged = true;
      res.trace.push_back(opt.rho2 * scheduling_penalty(u));
      return finish(u);
    }
  }

  // The start may violate the rate rows, so the trace begins at the first relaxation solution.
  for (int it = 0; it < opt.max_inner; ++it) {
    const Sp2bProgram sp = build_sp2b(cfg, bd, u, opt);
    const auto sol = conic::solve(sp.program, opt.solver);
    if (!sol.ok()) {
      if (sol.status == conic::Status::infeasible) {
        res.message = "rate requirement unsatisfiable under the current geometry (relaxation infeasible)";
        break;
      }
      res.message = std::string("relaxation ") + conic::to_string(sol.status) + ": " + sol.diagnostics;
      break;
    }
    Eigen::MatrixXd next(K, T);
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < K; ++k) next(k, t) = std::clamp(sol.value(sp.u[k + K * t]), 0.0, 1.0);
    const double J = opt.rho2 * scheduling_penalty(next);
    const bool first = res.trace.empty();
    const double prev = first ? J : res.trace.back();
    res.trace.push_back(J);
    u = next;
    if (integral(u, opt.integrality_tol)) break;
    if (!first && std::abs(J - prev) <= opt.eps * std::max(std::abs(prev), 1e-12)) break;
  }
  Eigen::MatrixXd p = project_schedule(u);
  if (!rates_ok(cfg, rates_of(bd, p)) && opt.repair) {
    res.repaired = repair_schedule(cfg, bd, p);
    if (res.repaired) res.message.clear();
  }
  return finish(p);
}

}  // namespace pinch
