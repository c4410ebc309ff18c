// SPDX-License-Identifier: Apache-2.0
#include "pinch/oracle.hpp"

#include <doctest.h>

#include <sstream>

using namespace pinch;

namespace {

ScenarioConfig tiny(int M, int T, int N, int K, double p_T) {
  ScenarioConfig cfg = default_scenario();
  cfg.num_clusters = M;
  cfg.num_slots = T;
  cfg.num_users = K;
  cfg.antennas_per_cluster = N;
  cfg.transmit_power = p_T;
  cfg.cluster_centers.clear();
  cfg.user_positions.clear();
  fill_derived_defaults(cfg);
  validate(cfg);
  return cfg;
}

}  // namespace

TEST_CASE("single cluster, single antenna: best grid point has the largest q") {
  const ScenarioConfig cfg = tiny(1, 1, 1, 1, 1e5);
  OracleBudget b;
  b.position_points = 3;
  const OracleResult r = enumerate(cfg, b, default_s_grid(cfg.snr_threshold), 1000, 7);
  REQUIRE(r.feasible);
  REQUIRE(r.table.size() == 3);
  double qmax = 0.0;
  int arg = -1;
  for (int i = 0; i < 3; ++i) {
    const double q = schedule_weights(cfg, r.table[i].schedule).q[0];
    if (q > qmax) qmax = q, arg = i;
  }
  CHECK(schedule_weights(cfg, r.best_chernoff.schedule).q[0] == qmax);
  CHECK(r.best_chernoff.log_bound == r.table[arg].log_bound);
}

TEST_CASE("all candidates violating the rate give an explicit infeasible result") {
  ScenarioConfig cfg = tiny(2, 2, 1, 1, 1e5);
  cfg.rate_min = 1e3;
  OracleBudget b;
  b.position_points = 2;
  b.tau_points = 2;
  const OracleResult r = enumerate(cfg, b, default_s_grid(cfg.snr_threshold), 100, 7);
  CHECK_FALSE(r.feasible);
  for (const auto& e : r.table) CHECK_FALSE(e.feasible);
}

TEST_CASE("limits and the candidate guard are enforced") {
  CHECK_THROWS_AS(enumerate(tiny(4, 2, 1, 1, 1e5), {}, {1.0}, 10, 1), OracleBudgetError);
  CHECK_THROWS_AS(enumerate(tiny(2, 3, 1, 1, 1e5), {}, {1.0}, 10, 1), OracleBudgetError);
  OracleBudget b;
  b.position_points = 8;
  CHECK_THROWS_AS(enumerate(tiny(2, 2, 1, 1, 1e5), b, {1.0}, 10, 1), OracleBudgetError);
  b.position_points = 7;
  b.max_candidates = 10;
  CHECK_THROWS_AS(enumerate(tiny(2, 2, 1, 1, 1e5), b, {1.0}, 10, 1), OracleBudgetError);
}

TEST_CASE("enumeration count, spacing and determinism") {
  const ScenarioConfig cfg = tiny(2, 2, 2, 1, 1e5);
  OracleBudget b;
  b.position_points = 3;
  b.tau_points = 3;
  const OracleResult r1 = enumerate(cfg, b, default_s_grid(cfg.snr_threshold, 8), 500, 11);
  const OracleResult r2 = enumerate(cfg, b, default_s_grid(cfg.snr_threshold, 8), 500, 11);
  // 3 x 3 grid with two antennas: pairs with x0 < x1 spaced by d_min or more.
  CHECK(oracle_candidate_count(cfg, b) == doctest::Approx(r1.enumerated));
  for (const auto& e : r1.table)
    for (int t = 0; t < 2; ++t)
      for (const auto& x : e.schedule.layouts[t].clusters) CHECK(x[1] - x[0] >= cfg.min_spacing * (1 - 1e-12));
  std::ostringstream a, c;
  write_oracle_csv(a, r1);
  write_oracle_csv(c, r2);
  CHECK(a.str() == c.str());
  CHECK(r1.best_chernoff.log_bound <= r1.best_mc.log_bound);
}
