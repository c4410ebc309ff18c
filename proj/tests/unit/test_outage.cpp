// SPDX-License-Identifier: Apache-2.0
#include "pinch/outage.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pinch;

namespace {

// P(a1 E1 + a2 E2 < g) for independent unit exponentials.
double hypoexp_cdf(double a1, double a2, double g) {
  if (std::abs(a1 - a2) < 1e-9 * a1) {
    const double x = g / a1;
    return 1.0 - std::exp(-x) * (1.0 + x);
  }
  return 1.0 - (a1 * std::exp(-g / a1) - a2 * std::exp(-g / a2)) / (a1 - a2);
}

RcsModel model_for(int m, double kappa, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ang(0.1, 3.0);
  Eigen::VectorXd a(m);
  for (int i = 0; i < m; ++i) a[i] = ang(gen);
  return build_covariance(a, 1.0, kappa);
}

}  // namespace

TEST_CASE("accumulated snr") {
  CHECK(accumulated_snr(Eigen::VectorXd::Zero(3), Eigen::VectorXcd::Ones(3)) == 0.0);
  Eigen::VectorXd q(1);
  q << 2.0;
  Eigen::VectorXcd s(1);
  s << std::complex<double>(1.0, 1.0);
  CHECK(accumulated_snr(q, s) == doctest::Approx(4.0));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd qq(5);
    Eigen::VectorXcd ss(5);
    double loop = 0.0;
    for (int i = 0; i < 5; ++i) {
      qq[i] = std::abs(nd(gen));
      ss[i] = {nd(gen), nd(gen)};
      loop += qq[i] * (ss[i].real() * ss[i].real() + ss[i].imag() * ss[i].imag());
    }
    const Eigen::MatrixXd Q = qq.asDiagonal();
    CHECK(accumulated_snr(qq, ss) == doctest::Approx(loop).epsilon(1e-12));
    CHECK(accumulated_snr(qq, ss) == doctest::Approx((ss.adjoint() * Q.cast<std::complex<double>>() * ss)(0).real()).epsilon(1e-12));
  }
}

TEST_CASE("monte carlo outage") {
  const auto m1 = build_covariance(Eigen::VectorXd::Constant(1, 1.0), 1.0, 0.1);
  const Eigen::VectorXd q1 = Eigen::VectorXd::Ones(1);
  CHECK(mc_outage(q1, m1, 0.0, 1000, 1).p_hat == 0.0);
  const auto e = mc_outage(q1, m1, std::log(2.0), 100000, 9);
  CHECK(std::abs(e.p_hat - 0.5) <= 3.0 * e.std_err);
  CHECK(e.std_err == doctest::Approx(std::sqrt(e.p_hat * (1 - e.p_hat) / 1e5)));

  Eigen::Vector2d ang(0.5, 1.5);
  const auto m2 = build_covariance(ang, 1.0, 1e6);
  const Eigen::Vector2d q2(3.0, 3.0);
  const auto e2 = mc_outage(q2, m2, 10.0, 100000, 4);
  CHECK(std::abs(e2.p_hat - hypoexp_cdf(3.0, 3.0, 10.0)) <= 3.0 * e2.std_err);
  const Eigen::Vector2d q3(2.0, 7.0);
  const auto e3 = mc_outage(q3, m2, 10.0, 100000, 4);
  CHECK(std::abs(e3.p_hat - hypoexp_cdf(2.0, 7.0, 10.0)) <= 3.0 * e3.std_err);
}

TEST_CASE("shared samples agree with direct sampling") {
  std::mt19937_64 gen(5);
  const auto m = model_for(3, 0.1, gen);
  const Eigen::Vector3d q(1.0, 4.0, 2.0);
  const auto s = draw_power_samples(m, 20000, 77);
  const auto a = mc_outage(q, m, 10.0, 20000, 77);
  const auto b = mc_outage(q, s, 10.0);
  CHECK(a.p_hat == b.p_hat);
}

TEST_CASE("monotone in q under common random numbers") {
  std::mt19937_64 gen(6);
  const auto m = model_for(4, 0.1, gen);
  const auto s = draw_power_samples(m, 20000, 1);
  Eigen::Vector4d q(1.0, 2.0, 0.5, 3.0);
  double prev = 1.0;
  for (int i = 0; i < 10; ++i) {
    const double p = mc_outage(q, s, 10.0).p_hat;
    CHECK(p <= prev);
    prev = p;
    q[i % 4] += 0.7;
  }
}

TEST_CASE("chernoff value") {
  const auto m1 = build_covariance(Eigen::VectorXd::Constant(1, 1.0), 2.0, 0.1);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, 30.0);
  CHECK(std::abs(chernoff_value(q, m1, 10.0, 1e-12)) < 1e-9);
  CHECK(chernoff_value(Eigen::VectorXd::Zero(1), m1, 10.0, 0.3) == doctest::Approx(3.0));
  // scalar closed form
  const double s = 0.05;
  CHECK(chernoff_value(q, m1, 10.0, s) == doctest::Approx(s * 10.0 - std::log(1.0 + s * 2.0 * 30.0)));
  // against det of the nonsymmetric product
  std::mt19937_64 gen(8);
  const auto m = model_for(4, 0.3, gen);
  const Eigen::Vector4d q4(2.0, 0.0, 5.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4) + 0.2 * m.covariance * q4.asDiagonal().toDenseMatrix();
  CHECK(chernoff_value(q4, m, 10.0, 0.2) == doctest::Approx(2.0 - std::log(a.determinant())).epsilon(1e-12));
}

TEST_CASE("chernoff bound search") {
  const auto m1 = build_covariance(Eigen::VectorXd::Constant(1, 1.0), 1.0, 0.1);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, 40.0);
  const auto r = chernoff_bound(q, m1, 10.0, default_s_grid(10.0));
  const double s_star = 1.0 / 10.0 - 1.0 / 40.0;
  CHECK(r.s_star == doctest::Approx(s_star).epsilon(1e-4));
  CHECK(r.bound == doctest::Approx(std::exp(r.log_bound)));
  CHECK(r.log_bound <= chernoff_value(q, m1, 10.0, s_star) + 1e-12);

  const auto grid = default_s_grid(10.0);
  const auto r0 = chernoff_bound(Eigen::VectorXd::Zero(1), m1, 10.0, grid);
  CHECK(r0.s_star == doctest::Approx(grid.front()));
  CHECK(r0.bound >= 1.0);
  CHECK(grid.size() == 32);
  CHECK(grid.front() == doctest::Approx(1e-4));
  CHECK(grid.back() == doctest::Approx(100.0));
}

TEST_CASE("chernoff dominates monte carlo") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> uq(0.0, 8.0), ug(2.0, 20.0), uk(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = model_for(3, uk(gen), gen);
    const Eigen::Vector3d q(uq(gen), uq(gen), uq(gen));
    const double g = ug(gen);
    const auto r = chernoff_bound(q, m, g, default_s_grid(g));
    const auto e = mc_outage(q, m, g, 20000, trial);
    CHECK(r.bound >= e.p_hat - 3.0 * e.std_err);
  }
}
