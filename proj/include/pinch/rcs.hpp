// SPDX-License-Identifier: Apache-2.0
// Angle-correlated complex Gaussian RCS model.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace pinch {

struct RcsModel {
  Eigen::MatrixXd covariance;  // R_Sigma
  Eigen::VectorXd angles;
  double zeta = 1.0;
  double kappa = 0.0;
  Eigen::MatrixXd factor;  // lower triangular, factor * factor^T = covariance

  int size() const { return static_cast<int>(angles.size()); }
};

RcsModel build_covariance(const Eigen::VectorXd& angles, double zeta, double kappa);

// Draw `index` of the stream keyed by seed.
Eigen::VectorXcd draw_rcs(const RcsModel& model, std::uint64_t seed, std::uint64_t index);
std::vector<Eigen::VectorXcd> sample_rcs(const RcsModel& model, std::uint64_t seed, std::int64_t n);

// Lower-triangular factor of a PSD matrix; pivots below tol * max diagonal are treated as zero.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double tol = 1e-13);

}  // namespace pinch
