// SPDX-License-Identifier: Apache-2.0
#include "pinch/rcs.hpp"

#include "pinch/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinch {

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double tol) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  const double scale = n > 0 ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double floor = tol * std::max(scale, 1e-300);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (d < -1e3 * floor) throw std::runtime_error("psd_cholesky: matrix is not positive semidefinite");
    if (d <= floor) continue;  // dependent column
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
  }
  return l;
}

RcsModel build_covariance(const Eigen::VectorXd& angles, double zeta, double kappa) {
  if (!(zeta > 0.0)) throw std::invalid_argument("build_covariance: zeta must be > 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("build_covariance: kappa must be >= 0");
  const int m = static_cast<int>(angles.size());
  RcsModel model;
  model.angles = angles;
  model.zeta = zeta;
  model.kappa = kappa;
  model.covariance.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      model.covariance(i, j) = i == j ? zeta : zeta * std::exp(-kappa * std::abs(angles[i] - angles[j]));
  model.factor = psd_cholesky(model.covariance);
  const double err = (model.factor * model.factor.transpose() - model.covariance).norm();
  if (err > 1e-10 * model.covariance.norm()) {
    // Near-singular kernels: fall back to a symmetric eigen square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.covariance);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(root);
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    model.factor = r.transpose();
    if ((model.factor * model.factor.transpose() - model.covariance).norm() > 1e-10 * model.covariance.norm())
      throw std::runtime_error("build_covariance: factorization failed");
  }
  return model;
}

Eigen::VectorXcd draw_rcs(const RcsModel& model, std::uint64_t seed, std::uint64_t index) {
  const int m = model.size();
  Eigen::VectorXcd w(m);
  for (int i = 0; i < m; ++i) w[i] = counter_cnormal(seed, index, static_cast<std::uint64_t>(i));
  return model.factor * w;
}

std::vector<Eigen::VectorXcd> sample_rcs(const RcsModel& model, std::uint64_t seed, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sample_rcs: n must be >= 1");
  std::vector<Eigen::VectorXcd> out;
  out.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) out.push_back(draw_rcs(model, seed, static_cast<std::uint64_t>(i)));
  return out;
}

}  // namespace pinch
