// SPDX-License-Identifier: Apache-2.0
#include "pinch/driver.hpp"

#include "pinch/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace pinch {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
  const int R = static_cast<int>(j.size()), C = R ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(R, C);
  for (int r = 0; r < R; ++r) {
    if (static_cast<int>(j[r].size()) != C) throw std::invalid_argument("schedule: ragged matrix");
    for (int c = 0; c < C; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool rates_met(const ScenarioConfig& cfg, const Schedule& s) {
  if (cfg.num_users == 0 || cfg.rate_min <= 0.0) return true;
  const Eigen::VectorXd r = user_rates(cfg, s);
  return (r.array() >= cfg.rate_min * (1.0 - 1e-7) - 1e-7).all();
}

}  // namespace

Candidate optimize_at(const ScenarioConfig& cfg, const RcsModel& model, double s, const DriverSettings& set) {
  Candidate c;
  c.s = s;
  Schedule sched = initial_schedule(cfg);
  if (set.initial_layout) sched.layouts.assign(cfg.num_slots, *set.initial_layout);

  if (!rates_met(cfg, sched)) {
    const Sp2bResult r = solve_sp2b(cfg, sched, set.sp2b);
    if (!r.feasible) {
      c.status = "infeasible";
      c.message = "initial schedule: " + r.message;
      c.schedule = sched;
      return c;
    }
    sched.u = r.u;
  }
  if (const std::string v = constraint_violation(cfg, sched); !v.empty()) {
    c.status = "infeasible";
    c.message = "initial schedule: " + v;
    c.schedule = sched;
    return c;
  }

  double F = schedule_objective(cfg, sched, model, s);
  c.trace.push_back({0, "init", F});
  int increases = 0;
  auto record = [&](int it, const char* block, double value) {
    const double prev = c.trace.back().value;
    if (value > prev + set.monotone_slack * std::abs(prev) + 1e-12) ++increases;
    c.trace.push_back({it, block, value});
  };

  BeamState beams = initial_beam_state(cfg, sched, set.sp2a);
  for (int it = 1; it <= set.max_outer; ++it) {
    const double F_start = F;
    c.iterations = it;

    const Sp1Result r1 = solve_sp1(cfg, sched.layouts, sched.u, sched.b, sched.tau, model, s, set.sp1);
    if (r1.feasible) {
      Schedule trial = sched;
      trial.b = r1.b;
      trial.tau = r1.tau;
      if (constraint_violation(cfg, trial).empty()) sched = trial;
      else c.warnings.push_back("iteration " + std::to_string(it) + ": cluster/duration step rejected");
    } else {
      c.warnings.push_back("iteration " + std::to_string(it) + ": cluster/duration step failed: " + r1.message);
    }
    F = schedule_objective(cfg, sched, model, s);
    record(it, "sp1", F);

    if (set.optimize_positions) {
      const Sp2aResult r2 = step_sp2a(cfg, sched, model, s, beams, set.sp2a);
      Schedule trial = sched;
      trial.layouts = r2.layouts;
      if (constraint_violation(cfg, trial).empty()) {
        sched = trial;
        beams = r2.state;
      } else {
        c.warnings.push_back("iteration " + std::to_string(it) + ": positioning step rejected");
      }
      F = schedule_objective(cfg, sched, model, s);
      record(it, "sp2a", F);
    }

    if (cfg.num_users > 0) {
      const Sp2bResult r3 = solve_sp2b(cfg, sched, set.sp2b);
      Schedule trial = sched;
      trial.u = r3.u;
      if (r3.feasible && constraint_violation(cfg, trial).empty()) sched = trial;
      else c.warnings.push_back("iteration " + std::to_string(it) + ": scheduling step kept the previous u: " +
                                r3.message);
      F = schedule_objective(cfg, sched, model, s);
      record(it, "sp2b", F);
    }

    if (increases > set.allowed_increases) {
      c.status = "aborted";
      c.message = "surrogate increased " + std::to_string(increases) + " times";
      break;
    }
    if (std::abs(F - F_start) <= set.eps * std::max(std::abs(F_start), 1e-12)) break;
  }
  for (const auto& w : beams.warnings) c.warnings.push_back(w);

  c.schedule = sched;
  c.surrogate = F;
  if (const std::string v = constraint_violation(cfg, sched); !v.empty()) {
    c.status = "infeasible";
    c.message = v;
  }
  return c;
}

SolutionBundle optimize(const ScenarioConfig& cfg, const DriverSettings& set) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(cfg);
  const RcsModel model = scenario_rcs(cfg);
  const std::vector<double> grid = set.s_grid.empty() ? default_s_grid(cfg.snr_threshold) : set.s_grid;

  std::vector<Candidate> cands(grid.size());
  parallel_chunks(static_cast<std::int64_t>(grid.size()), [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t i = b; i < e; ++i) {
      try {
        cands[i] = optimize_at(cfg, model, grid[i], set);
      } catch (const std::exception& ex) {
        cands[i].s = grid[i];
        cands[i].status = "failed";
        cands[i].message = ex.what();
      }
    }
  });

  if (set.select_by_mc)
    for (auto& c : cands)
      if (c.status == "ok" || c.status == "aborted")
        c.mc_outage = mc_outage(schedule_weights(cfg, c.schedule).q, model, cfg.snr_threshold,
                                set.select_mc_samples, set.seed)
                          .p_hat;

  // Completed candidates first; aborted ones only when nothing else is left.
  int best = -1;
  for (const char* wanted : {"ok", "aborted"}) {
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
      if (cands[i].status != wanted) continue;
      const double v = set.select_by_mc ? cands[i].mc_outage : cands[i].surrogate;
      const double w = best < 0 ? 0.0 : (set.select_by_mc ? cands[best].mc_outage : cands[best].surrogate);
      if (best < 0 || v < w) best = i;
    }
    if (best >= 0) break;
  }
  if (best < 0) {
    bool infeasible = false;
    std::string msg;
    for (const auto& c : cands)
      if (c.status == "infeasible") {
        infeasible = true;
        if (msg.empty()) msg = c.message;
      }
    if (infeasible) throw InfeasibleError("no feasible schedule for any s: " + msg);
    throw NumericalError("every s-candidate failed: " + (cands.empty() ? std::string("empty grid") : cands[0].message));
  }

  SolutionBundle sol;
  sol.schedule = cands[best].schedule;
  sol.s_star = cands[best].s;
  sol.surrogate = cands[best].surrogate;
  sol.q = schedule_weights(cfg, sol.schedule).q;
  sol.rho = slot_snr(cfg, sol.schedule).cwiseProduct(sol.schedule.u);
  sol.chernoff = chernoff_bound(sol.q, model, cfg.snr_threshold, grid);
  if (set.mc_samples > 0) sol.mc = mc_outage(sol.q, model, cfg.snr_threshold, set.mc_samples, set.seed);
  for (const auto& w : cands[best].warnings) sol.warnings.push_back(w);
  sol.candidates = std::move(cands);
  sol.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

nlohmann::json to_json(const Schedule& s) {
  nlohmann::json j;
  j["b"] = matrix_json(s.b);
  j["tau"] = vector_json(s.tau);
  j["u"] = matrix_json(s.u);
  nlohmann::json lay = nlohmann::json::array();
  for (const auto& l : s.layouts) {
    nlohmann::json cl = nlohmann::json::array();
    for (const auto& x : l.clusters) cl.push_back(vector_json(x));
    lay.push_back(cl);
  }
  j["positions"] = lay;
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  Schedule s;
  s.b = matrix_from(j.at("b"));
  s.tau = vector_from(j.at("tau"));
  s.u = matrix_from(j.at("u"));
  if (s.u.rows() == 0) s.u.resize(0, s.tau.size());
  for (const auto& slot : j.at("positions")) {
    AntennaLayout l;
    for (const auto& x : slot) l.clusters.push_back(vector_from(x));
    s.layouts.push_back(l);
  }
  return s;
}

nlohmann::json to_json(const SolutionBundle& sol, const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = to_json(cfg);
  j["schedule"] = to_json(sol.schedule);
  j["rho"] = matrix_json(sol.rho);
  j["q"] = vector_json(sol.q);
  j["s_star"] = sol.s_star;
  j["surrogate"] = sol.surrogate;
  j["chernoff"] = {{"s", sol.chernoff.s_star}, {"bound", sol.chernoff.bound}, {"log_bound", sol.chernoff.log_bound}};
  j["mc_outage"] = {{"p_hat", sol.mc.p_hat}, {"std_err", sol.mc.std_err}, {"n", sol.mc.n}, {"seed", sol.mc.seed}};
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : sol.candidates) {
    nlohmann::json cj;
    cj["s"] = c.s;
    cj["status"] = c.status;
    cj["message"] = c.message;
    cj["surrogate"] = c.surrogate;
    cj["iterations"] = c.iterations;
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& p : c.trace) tr.push_back({{"iteration", p.iteration}, {"block", p.block}, {"value", p.value}});
    cj["trace"] = tr;
    cj["warnings"] = c.warnings;
    if (c.mc_outage >= 0.0) cj["mc_outage"] = c.mc_outage;
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  j["warnings"] = sol.warnings;
  return j;
}

}  // namespace pinch
