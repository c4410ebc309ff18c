// SPDX-License-Identifier: Apache-2.0
#include "pinch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinch {

namespace {

double wrap(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::fixed_ula: return "fixed_ula";
    case Scheme::same_cluster: return "same_cluster";
    case Scheme::equal_slots: return "equal_slots";
    case Scheme::single_antenna: return "single_antenna";
    case Scheme::target_aligned: return "target_aligned";
    case Scheme::uniform: return "uniform";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : all_schemes())
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::vector<Scheme> all_schemes() {
  return {Scheme::proposed,       Scheme::fixed_ula,      Scheme::same_cluster, Scheme::equal_slots,
          Scheme::single_antenna, Scheme::target_aligned, Scheme::uniform};
}

double target_phase(const ScenarioConfig& cfg, double x) {
  const Point2 e = cfg.target_position;
  const double dx = x - e.x, l = std::abs(x - cfg.feed_point);
  const double d = std::sqrt(dx * dx + e.y * e.y + cfg.height * cfg.height);
  return wrap(-(2.0 * kPi / cfg.guided_wavelength() * l + 2.0 * kPi / cfg.wavelength() * d));
}

ScenarioConfig baseline_config(const ScenarioConfig& cfg, const BaselineSpec& spec) {
  ScenarioConfig c = cfg;
  if (spec.kind == Scheme::fixed_ula) {
    const int M = c.num_clusters, N = c.antennas_per_cluster;
    const double half = 0.5 * c.wavelength();
    c.min_spacing = half;
    c.aperture = N * half;
    c.cluster_centers.resize(M);
    for (int m = 0; m < M; ++m) c.cluster_centers[m] = spec.ula_center + (m - 0.5 * (M - 1)) * N * half;
  } else if (spec.kind == Scheme::single_antenna) {
    c.antennas_per_cluster = 1;
  }
  validate(c);
  return c;
}

AntennaLayout ula_layout(const ScenarioConfig& cfg) {
  AntennaLayout l;
  const int N = cfg.antennas_per_cluster;
  const double half = 0.5 * cfg.wavelength();
  for (int m = 0; m < cfg.num_clusters; ++m) {
    Eigen::VectorXd x(N);
    for (int n = 0; n < N; ++n) x[n] = cfg.cluster_centers[m] + (n - 0.5 * (N - 1)) * half;
    l.clusters.push_back(x);
  }
  return l;
}

AntennaLayout target_aligned_layout(const ScenarioConfig& cfg) {
  AntennaLayout l = uniform_layout(cfg);
  const int N = cfg.antennas_per_cluster;
  const double h = cfg.wavelength() / 400.0, d = cfg.min_spacing;
  for (int m = 0; m < cfg.num_clusters; ++m) {
    Eigen::VectorXd& x = l.clusters[m];
    const double ref = target_phase(cfg, x[0]);
    auto gap = [&](double v) { return std::abs(wrap(target_phase(cfg, v) - ref)); };
    for (int n = 1; n < N; ++n) {
      const double a = x[n - 1] + d, b = cfg.aperture_hi(m) - (N - 1 - n) * d;
      const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
      std::vector<double> g(steps + 1);
      double gmin = 1e300;
      for (int i = 0; i <= steps; ++i) gmin = std::min(gmin, g[i] = gap(std::min(a + i * h, b)));
      int i = 0;
      while (g[i] > gmin + 1e-3) ++i;
      // Refine inside the neighbouring cells.
      double lo = std::max(a, a + (i - 1) * h), hi = std::min(b, a + (i + 1) * h);
      const double r = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 60; ++it) {
        const double c1 = hi - r * (hi - lo), c2 = lo + r * (hi - lo);
        if (gap(c1) <= gap(c2)) hi = c2;
        else lo = c1;
      }
      const double v = 0.5 * (lo + hi);
      x[n] = gap(v) < g[i] ? v : std::min(a + i * h, b);
    }
  }
  return l;
}

DriverSettings baseline_settings(const ScenarioConfig& cfg, const BaselineSpec& spec, DriverSettings s) {
  switch (spec.kind) {
    case Scheme::proposed:
    case Scheme::single_antenna:
      break;
    case Scheme::fixed_ula:
      s.initial_layout = ula_layout(cfg);
      s.optimize_positions = false;
      break;
    case Scheme::same_cluster:
      s.sp1.same_cluster = true;
      break;
    case Scheme::equal_slots:
      s.sp1.fixed_tau = true;
      break;
    case Scheme::target_aligned:
      s.initial_layout = target_aligned_layout(cfg);
      s.optimize_positions = false;
      break;
    case Scheme::uniform:
      s.initial_layout = uniform_layout(cfg);
      s.optimize_positions = false;
      break;
  }
  return s;
}

BaselineRun run_baseline(const ScenarioConfig& cfg, const BaselineSpec& spec, const DriverSettings& settings) {
  BaselineRun run;
  run.config = baseline_config(cfg, spec);
  run.solution = optimize(run.config, baseline_settings(run.config, spec, settings));
  return run;
}

}  // namespace pinch
