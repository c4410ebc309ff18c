// SPDX-License-Identifier: Apache-2.0
#include "pinch/oracle.hpp"

#include "pinch/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace pinch {

namespace {

void check_limits(const ScenarioConfig& cfg, const OracleBudget& b) {
  auto fail = [](const std::string& what) { throw OracleBudgetError("oracle: " + what); };
  if (cfg.num_clusters > 3) fail("M must be <= 3");
  if (cfg.num_slots > 2) fail("T must be <= 2");
  if (cfg.antennas_per_cluster > 2) fail("N_T must be <= 2");
  if (cfg.num_users > 2) fail("K must be <= 2");
  if (b.position_points < 1 || b.position_points > 7) fail("position grid must have 1..7 points");
  if (b.tau_points < 1 || b.tau_points > 5) fail("duration grid must have 1..5 points");
}

// Sorted position tuples of cluster m on the per-antenna grids that respect d_min.
std::vector<Eigen::VectorXd> position_tuples(const ScenarioConfig& cfg, int m, int G) {
  const int N = cfg.antennas_per_cluster;
  const double d = cfg.min_spacing;
  std::vector<std::vector<double>> grid(N);
  for (int n = 0; n < N; ++n) {
    const double lo = cfg.aperture_lo(m) + n * d, hi = cfg.aperture_hi(m) - (N - 1 - n) * d;
    for (int i = 0; i < G; ++i) grid[n].push_back(G == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (G - 1));
  }
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(N, 0);
  for (;;) {
    Eigen::VectorXd x(N);
    bool ok = true;
    for (int n = 0; n < N; ++n) {
      x[n] = grid[n][idx[n]];
      if (n > 0 && x[n] - x[n - 1] < d * (1.0 - 1e-12)) ok = false;
    }
    if (ok) out.push_back(x);
    int n = N - 1;
    while (n >= 0 && ++idx[n] == G) idx[n--] = 0;
    if (n < 0) break;
  }
  return out;
}

std::vector<Eigen::VectorXd> duration_grid(const ScenarioConfig& cfg, int P) {
  const int T = cfg.num_slots;
  std::vector<Eigen::VectorXd> out;
  if (T == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, cfg.total_time));
    return out;
  }
  const double lo = cfg.min_slot, hi = cfg.total_time - cfg.min_slot;
  for (int i = 0; i < P; ++i) {
    const double t1 = P == 1 ? 0.5 * cfg.total_time : lo + (hi - lo) * i / (P - 1);
    Eigen::VectorXd tau(2);
    tau << t1, cfg.total_time - t1;
    out.push_back(tau);
  }
  return out;
}

struct Key {
  std::vector<int> act;
  std::vector<int> tuple;
  int tau = 0;
};

}  // namespace

double oracle_candidate_count(const ScenarioConfig& cfg, const OracleBudget& b) {
  const int T = cfg.num_slots;
  double n = 1.0;
  for (int t = 0; t < T; ++t) {
    double per = 0.0;
    for (int m = 0; m < cfg.num_clusters; ++m) per += static_cast<double>(position_tuples(cfg, m, b.position_points).size());
    n *= per * (cfg.num_users + 1);
  }
  return n * static_cast<double>(duration_grid(cfg, b.tau_points).size());
}

OracleResult enumerate(const ScenarioConfig& cfg, const OracleBudget& budget, const std::vector<double>& s_grid,
                       std::int64_t mc_samples, std::uint64_t seed) {
  validate(cfg);
  check_limits(cfg, budget);
  const double count = oracle_candidate_count(cfg, budget);
  if (count > budget.max_candidates)
    throw OracleBudgetError("oracle: " + std::to_string(static_cast<long long>(count)) + " candidates exceed the guard");

  const int M = cfg.num_clusters, T = cfg.num_slots, K = cfg.num_users;
  std::vector<std::vector<Eigen::VectorXd>> tuples(M);
  for (int m = 0; m < M; ++m) tuples[m] = position_tuples(cfg, m, budget.position_points);
  const auto taus = duration_grid(cfg, budget.tau_points);

  std::vector<Key> keys;
  std::vector<int> act(T, 0);
  for (;;) {
    std::vector<int> tup(T, 0);
    for (;;) {
      for (int p = 0; p < static_cast<int>(taus.size()); ++p) keys.push_back({act, tup, p});
      int t = T - 1;
      while (t >= 0 && ++tup[t] == static_cast<int>(tuples[act[t]].size())) tup[t--] = 0;
      if (t < 0) break;
    }
    int t = T - 1;
    while (t >= 0 && ++act[t] == M) act[t--] = 0;
    if (t < 0) break;
  }

  const RcsModel model = scenario_rcs(cfg);
  const RcsPowerSamples samples = draw_power_samples(model, std::max<std::int64_t>(mc_samples, 1), seed);
  const AntennaLayout base = uniform_layout(cfg);
  int patterns = 1;
  for (int t = 0; t < T; ++t) patterns *= K + 1;

  OracleResult res;
  res.enumerated = static_cast<std::int64_t>(count);
  res.table.resize(keys.size());
  parallel_chunks(static_cast<std::int64_t>(keys.size()), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const Key& k = keys[i];
      OracleEntry& e = res.table[i];
      Schedule& s = e.schedule;
      s.b = Eigen::MatrixXd::Zero(M, T);
      s.tau = taus[k.tau];
      s.layouts.assign(T, base);
      for (int t = 0; t < T; ++t) {
        s.b(k.act[t], t) = 1.0;
        s.layouts[t].clusters[k.act[t]] = tuples[k.act[t]][k.tuple[t]];
      }
      // First user pattern (lexicographic, nobody before user 0) meeting every rate.
      for (int p = 0; p < patterns && !e.feasible; ++p) {
        s.u = Eigen::MatrixXd::Zero(K, T);
        int code = p;
        for (int t = T - 1; t >= 0; --t) {
          const int who = code % (K + 1) - 1;
          code /= K + 1;
          if (who >= 0) s.u(who, t) = 1.0;
        }
        e.feasible = constraint_violation(cfg, s).empty();
      }
      if (!e.feasible) {
        s.u = Eigen::MatrixXd::Zero(K, T);
        e.log_bound = std::numeric_limits<double>::infinity();
        continue;
      }
      const Eigen::VectorXd q = schedule_weights(cfg, s).q;
      const ChernoffResult c = chernoff_bound(q, model, cfg.snr_threshold, s_grid);
      e.log_bound = c.log_bound;
      e.s = c.s_star;
      if (mc_samples > 0) e.mc = mc_outage(q, samples, cfg.snr_threshold);
    }
  });

  int bc = -1, bm = -1;
  for (int i = 0; i < static_cast<int>(res.table.size()); ++i) {
    const OracleEntry& e = res.table[i];
    if (!e.feasible) continue;
    if (bc < 0 || e.log_bound < res.table[bc].log_bound) bc = i;
    if (bm < 0 || e.mc.p_hat < res.table[bm].mc.p_hat ||
        (e.mc.p_hat == res.table[bm].mc.p_hat && e.log_bound < res.table[bm].log_bound))
      bm = i;
  }
  res.feasible = bc >= 0;
  if (res.feasible) {
    res.best_chernoff = res.table[bc];
    res.best_mc = res.table[bm];
  }
  return res;
}

void write_oracle_csv(std::ostream& os, const OracleResult& r) {
  os << "index,clusters,tau,positions,users,feasible,log_bound,s,mc_outage,mc_stderr\n";
  os.precision(17);
  for (size_t i = 0; i < r.table.size(); ++i) {
    const OracleEntry& e = r.table[i];
    const Schedule& s = e.schedule;
    const auto act = active_clusters(s.b);
    os << i << ',';
    for (size_t t = 0; t < act.size(); ++t) os << (t ? " " : "") << act[t];
    os << ',';
    for (int t = 0; t < s.tau.size(); ++t) os << (t ? " " : "") << s.tau[t];
    os << ',';
    for (size_t t = 0; t < act.size(); ++t) {
      const Eigen::VectorXd& x = s.layouts[t].clusters[act[t]];
      for (int n = 0; n < x.size(); ++n) os << (t || n ? " " : "") << x[n];
    }
    os << ',';
    for (int t = 0; t < s.u.cols(); ++t) {
      int who = -1;
      for (int k = 0; k < s.u.rows(); ++k)
        if (s.u(k, t) > 0.5) who = k;
      os << (t ? " " : "") << who;
    }
    os << ',' << (e.feasible ? 1 : 0) << ',';
    if (e.feasible) os << e.log_bound << ',' << e.s << ',' << e.mc.p_hat << ',' << e.mc.std_err;
    else os << ",,,";
    os << '\n';
  }
}

}  // namespace pinch
