// SPDX-License-Identifier: Apache-2.0
// Radiated sensing power over the ground area, per slot.
#pragma once

#include "pinch/schedule.hpp"

#include <iosfwd>
#include <vector>

namespace pinch {

struct FieldPoint {
  int slot = 0;
  double x = 0.0;
  double y = 0.0;
  double p_db = 0.0;  // relative to the slot's maximum over the grid
};

// |sum_n (eta / d_n) exp(-alpha l_n) exp(-j(k_g l_n + k d_n))|^2 at ground point g.
double field_power(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, Point2 g);

// Grid x, y = 0, res, 2 res, ... over [0, D_x] x [0, D_x].
std::vector<double> field_axis(const ScenarioConfig& cfg, double resolution);

// Active cluster of every slot of sched.
std::vector<FieldPoint> field_map(const ScenarioConfig& cfg, const Schedule& sched, double resolution);

// Normalized power (dB) at the grid point nearest to g, normalization over the same grid.
double normalized_power_at(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, Point2 g, double resolution);

void write_field_csv(std::ostream& os, const std::vector<FieldPoint>& field);

}  // namespace pinch
