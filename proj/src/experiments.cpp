// SPDX-License-Identifier: Apache-2.0
#include "pinch/experiments.hpp"

#include "pinch/parallel.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace pinch {

void apply_parameter(ScenarioConfig& cfg, const std::string& name, double v) {
  auto count = [&](double x) {
    if (!(x >= 1.0) || x != std::floor(x)) throw std::invalid_argument(name + " must be a positive integer");
    return static_cast<int>(x);
  };
  if (name == "p_T") {
    cfg.transmit_power = v;
  } else if (name == "kappa") {
    cfg.rcs_decay = v;
  } else if (name == "R_min") {
    cfg.rate_min = v;
  } else if (name == "N_T") {
    cfg.antennas_per_cluster = count(v);
  } else if (name == "T") {
    cfg.num_slots = count(v);
    fill_derived_defaults(cfg);
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + name + "' (p_T, kappa, R_min, N_T, T)");
  }
  validate(cfg);
}

ScenarioConfig desk_profile(ScenarioConfig cfg) {
  cfg.num_clusters = 6;
  cfg.antennas_per_cluster = 2;
  cfg.num_users = 2;
  cfg.num_slots = 4;
  cfg.cluster_centers.clear();
  cfg.user_positions.clear();
  fill_derived_defaults(cfg);
  validate(cfg);
  return cfg;
}

std::vector<double> desk_power_grid() { return log_grid(1e4, 3.1622776601683795e5, 8); }

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, const DriverSettings& base) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: empty value list");
  if (spec.samples < 1000) throw std::invalid_argument("sweep: at least 1000 samples per point");
  const int V = static_cast<int>(spec.values.size());
  std::vector<SweepRow> rows(spec.schemes.size() * V);
  parallel_chunks(static_cast<std::int64_t>(rows.size()), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t i = lo; i < hi; ++i) {
      SweepRow& r = rows[i];
      r.scheme = spec.schemes[i / V];
      r.parameter = spec.parameter;
      r.value = spec.values[i % V];
      r.seed = spec.seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ScenarioConfig c = cfg;
        apply_parameter(c, spec.parameter, r.value);
        DriverSettings st = base;
        st.seed = spec.seed;
        st.mc_samples = spec.samples;
        const BaselineRun run = run_baseline(c, {r.scheme}, st);
        r.chernoff_bound = run.solution.chernoff.bound;
        r.mc_outage = run.solution.mc.p_hat;
        r.mc_stderr = run.solution.mc.std_err;
      } catch (const InfeasibleError& e) {
        r.status = std::string("infeasible: ") + e.what();
      } catch (const std::exception& e) {
        r.status = std::string("failed: ") + e.what();
      }
      if (spec.timing) r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "scheme,swept_param,value,chernoff_bound,mc_outage,mc_stderr,runtime_s,seed,status\n";
  os.precision(17);
  for (const auto& r : rows) {
    std::string status = r.status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    os << to_string(r.scheme) << ',' << r.parameter << ',' << r.value << ',' << r.chernoff_bound << ','
       << r.mc_outage << ',' << r.mc_stderr << ',' << r.runtime_s << ',' << r.seed << ',' << status << '\n';
  }
}

}  // namespace pinch
