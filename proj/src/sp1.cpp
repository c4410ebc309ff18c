// SPDX-License-Identifier: Apache-2.0
#include "pinch/sp1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pinch {

using conic::Affine;

Sp1Tables sp1_tables(const ScenarioConfig& cfg, const SlotLayouts& layouts) {
  const int M = cfg.num_clusters, T = cfg.num_slots, K = cfg.num_users;
  Sp1Tables tab;
  tab.psi = psi_gain(cfg);
  tab.gain.resize(M, T);
  tab.rate.assign(K, Eigen::MatrixXd(M, T));
  for (int t = 0; t < T; ++t)
    for (int m = 0; m < M; ++m) {
      const auto& x = layouts.at(t).clusters.at(m);
      tab.gain(m, t) = sensing_gain(cfg, x);
      for (int k = 0; k < K; ++k) tab.rate[k](m, t) = std::log2(1.0 + comm_snr(cfg, x, k));
    }
  return tab;
}

Eigen::VectorXd logdet_gradient(const Eigen::VectorXd& q, const Eigen::MatrixXd& R, double s) {
  const int M = static_cast<int>(q.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M, M) + s * R * q.asDiagonal();
  const Eigen::MatrixXd X = A.partialPivLu().solve(R);
  return s * X.diagonal();
}

conic::SmoothTerm chernoff_term(const RcsModel& model, double gamma_th, double s, const std::vector<Affine>& q,
                                int num_variables) {
  const int M = model.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, num_variables);
  Eigen::VectorXd q0(M);
  for (int m = 0; m < M; ++m) {
    for (const auto& t : q.at(m).terms) J(m, t.var) += t.coef;
    q0[m] = q[m].constant;
  }
  const Eigen::MatrixXd L = model.factor;
  return [=](const Eigen::VectorXd& x, double& f, Eigen::VectorXd* g, Eigen::MatrixXd* H) {
    const Eigen::VectorXd qv = J * x + q0;
    Eigen::MatrixXd X = s * (L.transpose() * qv.asDiagonal() * L);
    X.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) return false;
    const auto d = llt.matrixLLT().diagonal();
    if ((d.array() <= 0.0).any()) return false;
    f = s * gamma_th - 2.0 * d.array().log().sum();
    if (g || H) {
      const Eigen::MatrixXd B = L * llt.solve(L.transpose());
      if (g) *g = J.transpose() * (-s * B.diagonal());
      if (H) *H = J.transpose() * (s * s * B.cwiseAbs2()) * J;
    }
    return true;
  };
}

namespace {

Eigen::VectorXd q_of(const Sp1Tables& tab, const Eigen::MatrixXd& b, const Eigen::VectorXd& tau_hat) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(b.rows());
  for (int t = 0; t < b.cols(); ++t)
    for (int m = 0; m < b.rows(); ++m) q[m] += tab.psi * b(m, t) * tau_hat[t] * tab.gain(m, t);
  return q;
}

double penalty(const Eigen::MatrixXd& b) { return (b.array() * (1.0 - b.array())).sum(); }

bool integral(const Eigen::MatrixXd& b, double tol) {
  return (b.array().min(1.0 - b.array())).maxCoeff() <= tol;
}

Eigen::MatrixXd project_one_hot(const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  for (int t = 0; t < b.cols(); ++t) {
    int best = 0;
    for (int m = 1; m < b.rows(); ++m)
      if (b(m, t) > b(best, t) + 1e-12) best = m;
    out(best, t) = 1.0;
  }
  return out;
}

}  // namespace

Sp1Program build_sp1(const ScenarioConfig& cfg, const Sp1Tables& tab, const Eigen::MatrixXd& u,
                     const Eigen::MatrixXd& b_l, const Eigen::VectorXd& tau_l, const RcsModel& model, double s,
                     double rho, const Sp1Options& opt, bool fixed_b) {
  const int M = cfg.num_clusters, T = cfg.num_slots, K = cfg.num_users;
  const double Tmax = cfg.total_time;
  Sp1Program sp;
  auto& prog = sp.program;
  const bool free_b = !fixed_b && M > 1;
  const bool free_tau = !opt.fixed_tau;

  // Selection variables.
  sp.b.resize(M * T);
  if (free_b) {
    const int cols = opt.same_cluster ? 1 : T;
    std::vector<int> ids(M * cols);
    for (int c = 0; c < cols; ++c)
      for (int m = 0; m < M; ++m) ids[m + M * c] = prog.add_variable(0.0, 1.0, "b");
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) sp.b[m + M * t] = prog.var(ids[m + M * (opt.same_cluster ? 0 : t)]);
    for (int c = 0; c < cols; ++c) {
      Affine sum;
      for (int m = 0; m < M; ++m) sum += prog.var(ids[m + M * c]);
      prog.add_equality(sum - 1.0);  // C2
    }
  } else {
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) sp.b[m + M * t] = Affine(M == 1 ? 1.0 : b_l(m, t));
  }

  // Durations.
  sp.tau.resize(T);
  const double tmin = cfg.min_slot / Tmax;
  if (free_tau) {
    Affine total;
    for (int t = 0; t < T; ++t) {
      sp.tau[t] = prog.var(prog.add_variable(tmin, 1.0, "tau"));
      total += sp.tau[t];
    }
    prog.add_leq(total, 1.0);  // C3
  } else {
    for (int t = 0; t < T; ++t) sp.tau[t] = Affine(tau_l[t] / Tmax);
  }

  // Products p = tau * b.
  sp.p.resize(M * T);
  if (free_b && free_tau) {
    for (int t = 0; t < T; ++t) {
      Affine sum;
      for (int m = 0; m < M; ++m) {
        const int i = m + M * t;
        sp.p[i] = prog.var(prog.add_variable("p"));
        prog.add_nonneg(sp.p[i]);                            // C8 lower
        prog.add_leq(sp.p[i], sp.b[i]);                      // C8 upper
        prog.add_leq(sp.tau[t] - (1.0 - sp.b[i]), sp.p[i]);  // C9 lower
        prog.add_leq(sp.p[i], sp.tau[t]);                    // C9 upper
        sum += sp.p[i];
      }
      prog.add_equality(sum - sp.tau[t]);  // valid cut from C2
    }
  } else if (free_b) {
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) sp.p[m + M * t] = sp.b[m + M * t] * sp.tau[t].constant;
  } else {
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) sp.p[m + M * t] = sp.tau[t] * sp.b[m + M * t].constant;
  }

  // C1 with the sum over clusters.
  for (int k = 0; k < K; ++k) {
    Affine rate;
    for (int t = 0; t < T; ++t) {
      if (u(k, t) <= 0.0) continue;
      for (int m = 0; m < M; ++m) rate += sp.p[m + M * t] * (u(k, t) * tab.rate[k](m, t));
    }
    if (cfg.rate_min > 0.0) prog.add_leq(Affine(cfg.rate_min), rate);
  }

  sp.q.assign(M, Affine());
  for (int t = 0; t < T; ++t)
    for (int m = 0; m < M; ++m) sp.q[m] += sp.p[m + M * t] * (tab.psi * tab.gain(m, t));

  Affine obj;
  if (free_b) {
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) obj += rho * (1.0 - 2.0 * b_l(m, t)) * sp.b[m + M * t] + rho * b_l(m, t) * b_l(m, t);
  }
  if (opt.exact_logdet) {
    prog.add_smooth_objective(chernoff_term(model, cfg.snr_threshold, s, sp.q, prog.num_variables()));
  } else {
    Eigen::VectorXd q_l = q_of(tab, b_l, tau_l / Tmax);
    const Eigen::VectorXd g = logdet_gradient(q_l, model.covariance, s);
    for (int m = 0; m < M; ++m) obj += -g[m] * (sp.q[m] - q_l[m]);
  }
  prog.minimize(obj);
  return sp;
}

Sp1Result solve_sp1(const ScenarioConfig& cfg, const SlotLayouts& layouts, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& b_init, const Eigen::VectorXd& tau_init, const RcsModel& model, double s,
                    const Sp1Options& opt) {
  const int M = cfg.num_clusters, T = cfg.num_slots;
  const double Tmax = cfg.total_time;
  const Sp1Tables tab = sp1_tables(cfg, layouts);
  const double gth = cfg.snr_threshold;
  auto F = [&](const Eigen::MatrixXd& b, const Eigen::VectorXd& tau) {
    return chernoff_value(q_of(tab, b, tau / Tmax), model, gth, s);
  };

  Sp1Result res;
  Eigen::MatrixXd b = b_init;
  Eigen::VectorXd tau = tau_init;
  // The incumbent is only a fallback if it is feasible.
  bool incumbent_ok = true;
  try {
    Schedule inc{b_init, tau_init, u, layouts};
    incumbent_ok = constraint_violation(cfg, inc).empty();
  } catch (...) {
    incumbent_ok = false;
  }
  const double F_init = F(b_init, tau_init);
  // Exact surrogate as a function of the products p / T_max.
  auto q_value = [&](const Eigen::MatrixXd& pp) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(M);
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) q[m] += tab.psi * pp(m, t) * tab.gain(m, t);
    return chernoff_value(q, model, gth, s);
  };

  const bool relax = M > 1;
  if (relax) {
    double rho = opt.rho_start > 0.0 ? opt.rho_start : 1e-2 * (1.0 + std::abs(F_init));
    Eigen::MatrixXd p = b;
    for (int t = 0; t < T; ++t) p.col(t) *= tau[t] / Tmax;
    double J = F_init + rho * penalty(b);
    res.trace.push_back(J);
    res.rho_trace.push_back(rho);
    bool failed = false;
    for (int stage = 0; stage < 64 && !failed; ++stage) {
      for (int it = 0; it < opt.max_inner; ++it) {
        const Sp1Program sp = build_sp1(cfg, tab, u, b, tau, model, s, rho, opt, false);
        // Start from the current point when it still fits the program.
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sp.program.num_variables());
        auto set = [&](const Affine& a, double v) {
          if (a.terms.size() == 1 && a.terms[0].coef == 1.0 && a.constant == 0.0) x0[a.terms[0].var] = v;
        };
        for (int t = 0; t < T; ++t) {
          set(sp.tau[t], tau[t] / Tmax);
          for (int m = 0; m < M; ++m) {
            set(sp.b[m + M * t], b(m, t));
            set(sp.p[m + M * t], p(m, t));
          }
        }
        const auto sol = conic::solve(sp.program, opt.solver, x0);
        if (!sol.ok()) {
          res.message = std::string("relaxation ") + conic::to_string(sol.status) + ": " + sol.diagnostics;
          failed = true;
          break;
        }
        Eigen::MatrixXd b_new(M, T), p_new(M, T);
        Eigen::VectorXd tau_new(T);
        for (int t = 0; t < T; ++t) {
          tau_new[t] = sol.value(sp.tau[t]) * Tmax;
          for (int m = 0; m < M; ++m) {
            b_new(m, t) = std::clamp(sol.value(sp.b[m + M * t]), 0.0, 1.0);
            p_new(m, t) = std::max(0.0, sol.value(sp.p[m + M * t]));
          }
        }
        auto Jof = [&](const Eigen::MatrixXd& bb, const Eigen::MatrixXd& pp) { return q_value(pp) + rho * penalty(bb); };
        double J_new = Jof(b_new, p_new);
        if (!opt.exact_logdet) {
          // Exact line search on the segment; the linearized step alone is not monotone.
          double best_beta = 1.0, best = J_new;
          for (int i = 0; i <= 32; ++i) {
            const double beta = i / 32.0;
            const double v = Jof(b + beta * (b_new - b), p + beta * (p_new - p));
            if (v < best) {
              best = v;
              best_beta = beta;
            }
          }
          b_new = b + best_beta * (b_new - b);
          p_new = p + best_beta * (p_new - p);
          tau_new = tau + best_beta * (tau_new - tau);
          J_new = best;
        }
        const double change = std::abs(J_new - J) / std::max(std::abs(J), 1e-12);
        b = b_new;
        p = p_new;
        tau = tau_new;
        J = J_new;
        res.trace.push_back(J);
        res.rho_trace.push_back(rho);
        if (change < opt.eps) break;
      }
      if (failed || integral(b, opt.integrality_tol)) break;
      if (rho >= opt.rho_max) break;
      rho = std::min(2.0 * rho, opt.rho_max);
      J = q_value(p) + rho * penalty(b);  // re-based at the new penalty
      res.trace.push_back(J);
      res.rho_trace.push_back(rho);
    }
    res.integral_before_projection = integral(b, opt.integrality_tol);
    if (failed) b = b_init, tau = tau_init;
  }

  // Project and re-solve the durations with the selection frozen.
  Eigen::MatrixXd b_proj = project_one_hot(b);
  auto polish = [&](const Eigen::MatrixXd& bf, const Eigen::VectorXd& tf, Eigen::VectorXd& out) {
    const Sp1Program sp = build_sp1(cfg, tab, u, bf, tf, model, s, 0.0, opt, true);
    if (sp.program.num_variables() == 0) {
      out = tf;
      Schedule chk{bf, tf, u, layouts};
      return constraint_violation(cfg, chk).empty();
    }
    Eigen::VectorXd x0(sp.program.num_variables());
    for (int t = 0; t < T; ++t) x0[t] = tf[t] / Tmax;
    const auto sol = conic::solve(sp.program, opt.solver, x0);
    if (!sol.ok()) return false;
    out.resize(T);
    for (int t = 0; t < T; ++t) out[t] = std::max(sol.value(sp.tau[t]) * Tmax, cfg.min_slot);
    const double total = out.sum();
    if (total > Tmax) out *= Tmax / total;
    return true;
  };
  Eigen::VectorXd tau_proj;
  bool ok = polish(b_proj, tau, tau_proj);
  double F_new = ok ? F(b_proj, tau_proj) : std::numeric_limits<double>::infinity();
  if (ok) {
    Schedule chk{b_proj, tau_proj, u, layouts};
    if (!constraint_violation(cfg, chk, 1e-6).empty()) ok = false, F_new = std::numeric_limits<double>::infinity();
  }

  // Single-switch neighbourhood: move one slot (or the shared column) to another cluster.
  if (ok && opt.local_search && M > 1) {
    for (int pass = 0; pass < 4; ++pass) {
      bool improved = false;
      const int slots = opt.same_cluster ? 1 : T;
      for (int t = 0; t < slots; ++t) {
        for (int m = 0; m < M; ++m) {
          Eigen::MatrixXd cand = b_proj;
          if (opt.same_cluster) {
            cand.setZero();
            cand.row(m).setOnes();
          } else {
            cand.col(t).setZero();
            cand(m, t) = 1.0;
          }
          if (cand == b_proj) continue;
          Eigen::VectorXd tc;
          if (!polish(cand, tau_proj, tc)) continue;
          Schedule chk{cand, tc, u, layouts};
          if (!constraint_violation(cfg, chk, 1e-6).empty()) continue;
          const double v = F(cand, tc);
          if (v < F_new - 1e-12 * std::max(1.0, std::abs(F_new))) {
            b_proj = cand;
            tau_proj = tc;
            F_new = v;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }

  // Safeguard against the incumbent, with its own durations re-optimized.
  if (incumbent_ok) {
    Eigen::VectorXd tau_inc;
    double F_inc = F_init;
    Eigen::VectorXd tau_best = tau_init;
    if (polish(b_init, tau_init, tau_inc)) {
      Schedule chk{b_init, tau_inc, u, layouts};
      const double v = F(b_init, tau_inc);
      if (constraint_violation(cfg, chk, 1e-6).empty() && v < F_inc) {
        F_inc = v;
        tau_best = tau_inc;
      }
    }
    if (!(F_new <= F_inc)) {
      b_proj = b_init;
      tau_proj = tau_best;
      F_new = F_inc;
      ok = true;
      res.kept_incumbent = true;
    }
  }
  res.feasible = ok;
  res.b = b_proj;
  res.tau = ok ? tau_proj : tau_init;
  res.objective = F_new;
  if (!ok && res.message.empty()) res.message = "no feasible selection for the current user schedule";
  return res;
}

}  // namespace pinch
