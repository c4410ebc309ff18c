// SPDX-License-Identifier: Apache-2.0
// Accumulated sensing SNR, Monte Carlo outage and the Chernoff surrogate.
#pragma once

#include "pinch/rcs.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace pinch {

struct OutageEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

struct ChernoffResult {
  double s_star = 0.0;
  double bound = 1.0;
  double log_bound = 0.0;
};

double accumulated_snr(const Eigen::VectorXd& q, const Eigen::VectorXcd& sigma);

OutageEstimate mc_outage(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th, std::int64_t n,
                         std::uint64_t seed);

// Pre-drawn |Sigma(m)|^2 values (n x M) for common-random-number comparisons.
struct RcsPowerSamples {
  Eigen::MatrixXd power;
  std::uint64_t seed = 0;
};
RcsPowerSamples draw_power_samples(const RcsModel& model, std::int64_t n, std::uint64_t seed);
OutageEstimate mc_outage(const Eigen::VectorXd& q, const RcsPowerSamples& samples, double gamma_th);

double chernoff_value(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th, double s);
// Same as chernoff_value for an explicit covariance.
double chernoff_value(const Eigen::VectorXd& q, const Eigen::MatrixXd& cov, double gamma_th, double s);

ChernoffResult chernoff_bound(const Eigen::VectorXd& q, const RcsModel& model, double gamma_th,
                              const std::vector<double>& grid);

std::vector<double> log_grid(double lo, double hi, int n);
// 32 log-spaced points in [1e-3/gamma_th, 1e3/gamma_th].
std::vector<double> default_s_grid(double gamma_th, int n = 32);

}  // namespace pinch
