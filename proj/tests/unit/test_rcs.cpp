// SPDX-License-Identifier: Apache-2.0
#include "pinch/rcs.hpp"

#include <doctest.h>

#include <cmath>

using namespace pinch;

namespace {
Eigen::VectorXd angles4() {
  Eigen::VectorXd a(4);
  a << 0.4, 0.9, 1.3, 2.2;
  return a;
}
}  // namespace

TEST_CASE("covariance kernel") {
  SUBCASE("fully correlated") {
    const auto m = build_covariance(angles4(), 2.0, 0.0);
    CHECK((m.covariance - 2.0 * Eigen::MatrixXd::Ones(4, 4)).norm() < 1e-15);
    CHECK((m.factor * m.factor.transpose() - m.covariance).norm() <= 1e-10 * m.covariance.norm());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m.covariance);
    CHECK(lu.rank() == 1);
  }
  SUBCASE("uncorrelated limit") {
    const auto m = build_covariance(angles4(), 1.0, 1e6);
    CHECK((m.covariance - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("half correlation") {
    Eigen::Vector2d a(0.2, 0.2 + std::log(2.0));
    const auto m = build_covariance(a, 3.0, 1.0);
    CHECK(m.covariance(0, 1) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(m.covariance(1, 0) == doctest::Approx(1.5).epsilon(1e-14));
  }
  SUBCASE("factor is lower triangular and accurate for every decay") {
    for (double kappa : {0.0, 1e-4, 0.01, 0.1, 1.0, 1e6}) {
      const auto m = build_covariance(angles4(), 1.0, kappa);
      CHECK(m.factor.isLowerTriangular(0.0));
      CHECK((m.factor * m.factor.transpose() - m.covariance).norm() <= 1e-10 * m.covariance.norm());
    }
  }
  CHECK_THROWS(build_covariance(angles4(), 0.0, 0.1));
  CHECK_THROWS(build_covariance(angles4(), 1.0, -1.0));
}

TEST_CASE("sampler") {
  SUBCASE("single cluster power is exponential with mean zeta") {
    const auto m = build_covariance(Eigen::VectorXd::Constant(1, 0.5), 1.7, 0.1);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (const auto& s : sample_rcs(m, 11, n)) {
      const double p = std::norm(s[0]);
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.7) <= 3.0 * se);
  }
  SUBCASE("kappa zero gives identical entries") {
    const auto m = build_covariance(angles4(), 1.0, 0.0);
    for (const auto& s : sample_rcs(m, 3, 50))
      for (int i = 1; i < 4; ++i) CHECK(std::abs(s[i] - s[0]) <= 1e-12 * std::abs(s[0]));
  }
  SUBCASE("deterministic and index keyed") {
    const auto m = build_covariance(angles4(), 1.0, 0.1);
    const auto a = sample_rcs(m, 42, 10);
    const auto b = sample_rcs(m, 42, 10);
    for (int i = 0; i < 10; ++i) CHECK(a[i] == b[i]);
    CHECK(draw_rcs(m, 42, 7) == a[7]);
    CHECK(draw_rcs(m, 43, 7) != a[7]);
  }
  SUBCASE("circular symmetry") {
    const auto m = build_covariance(angles4(), 2.0, 0.1);
    const int n = 50000;
    Eigen::Vector4d re2 = Eigen::Vector4d::Zero(), im2 = Eigen::Vector4d::Zero();
    for (const auto& s : sample_rcs(m, 5, n)) {
      re2 += s.real().cwiseAbs2();
      im2 += s.imag().cwiseAbs2();
    }
    for (int i = 0; i < 4; ++i) {
      CHECK(re2[i] / n == doctest::Approx(1.0).epsilon(0.03));
      CHECK(im2[i] / n == doctest::Approx(1.0).epsilon(0.03));
    }
  }
}
