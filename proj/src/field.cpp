// SPDX-License-Identifier: Apache-2.0
#include "pinch/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

namespace pinch {

double field_power(const ScenarioConfig& cfg, const Eigen::VectorXd& x, Point2 g) {
  const double k = 2.0 * kPi / cfg.wavelength(), kg = 2.0 * kPi / cfg.guided_wavelength();
  std::complex<double> sum = 0.0;
  for (int n = 0; n < x.size(); ++n) {
    const double dx = x[n] - g.x, l = std::abs(x[n] - cfg.feed_point);
    const double d = std::sqrt(dx * dx + g.y * g.y + cfg.height * cfg.height);
    sum += std::polar(cfg.eta() / d * std::exp(-cfg.attenuation * l), -(kg * l + k * d));
  }
  return std::norm(sum);
}

std::vector<double> field_axis(const ScenarioConfig& cfg, double res) {
  if (!(res > 0.0)) throw std::invalid_argument("field: resolution must be > 0");
  const int n = static_cast<int>(std::floor(cfg.waveguide_length / res + 1e-9));
  std::vector<double> a(n + 1);
  for (int i = 0; i <= n; ++i) a[i] = i * res;
  return a;
}

std::vector<FieldPoint> field_map(const ScenarioConfig& cfg, const Schedule& sched, double res) {
  const auto axis = field_axis(cfg, res);
  const auto act = active_clusters(sched.b);
  std::vector<FieldPoint> out;
  for (int t = 0; t < static_cast<int>(act.size()); ++t) {
    const Eigen::VectorXd& x = sched.layouts.at(t).clusters.at(act[t]);
    const size_t first = out.size();
    double pmax = 0.0;
    for (double gx : axis)
      for (double gy : axis) {
        const double p = field_power(cfg, x, {gx, gy});
        pmax = std::max(pmax, p);
        out.push_back({t, gx, gy, p});
      }
    for (size_t i = first; i < out.size(); ++i) out[i].p_db = 10.0 * std::log10(out[i].p_db / pmax);
  }
  return out;
}

double normalized_power_at(const ScenarioConfig& cfg, const Eigen::VectorXd& x, Point2 g, double res) {
  const auto axis = field_axis(cfg, res);
  auto nearest = [&](double v) {
    const double i = std::round(v / res);
    return std::clamp(i, 0.0, static_cast<double>(axis.size() - 1)) * res;
  };
  double pmax = 0.0;
  for (double gx : axis)
    for (double gy : axis) pmax = std::max(pmax, field_power(cfg, x, {gx, gy}));
  return 10.0 * std::log10(field_power(cfg, x, {nearest(g.x), nearest(g.y)}) / pmax);
}

void write_field_csv(std::ostream& os, const std::vector<FieldPoint>& field) {
  os << "slot,x,y,p_db\n";
  os.precision(10);
  for (const auto& f : field) os << f.slot << ',' << f.x << ',' << f.y << ',' << f.p_db << '\n';
}

}  // namespace pinch
