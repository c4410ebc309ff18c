// SPDX-License-Identifier: Apache-2.0
// Exhaustive reference solver for tiny instances on discretized positions and durations.
#pragma once

#include "pinch/outage.hpp"
#include "pinch/schedule.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace pinch {

class OracleBudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct OracleBudget {
  int position_points = 5;  // per antenna, <= 7
  int tau_points = 5;       // <= 5
  double max_candidates = 1e7;
};

struct OracleEntry {
  Schedule schedule;
  bool feasible = false;       // C1 at exact rates
  double log_bound = 0.0;      // min over s of the Chernoff surrogate
  double s = 0.0;
  OutageEstimate mc;
};

struct OracleResult {
  bool feasible = false;  // at least one candidate meets every constraint
  OracleEntry best_chernoff;
  OracleEntry best_mc;
  std::vector<OracleEntry> table;  // every enumerated (b, tau, x) with the first feasible u
  std::int64_t enumerated = 0;
};

// Number of (b, u, x, tau) combinations the enumeration visits.
double oracle_candidate_count(const ScenarioConfig& cfg, const OracleBudget& budget);

OracleResult enumerate(const ScenarioConfig& cfg, const OracleBudget& budget, const std::vector<double>& s_grid,
                       std::int64_t mc_samples, std::uint64_t seed);

void write_oracle_csv(std::ostream& os, const OracleResult& r);

}  // namespace pinch
