// SPDX-License-Identifier: Apache-2.0
#include "pinch/channel.hpp"

#include <doctest.h>

#include <cmath>

using namespace pinch;

namespace {
ScenarioConfig base() {
  auto cfg = default_scenario();
  cfg.transmit_power = 1e4;
  return cfg;
}
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}
}  // namespace

TEST_CASE("single antenna at the feed without attenuation") {
  auto cfg = base();
  cfg.attenuation = 0.0;
  const Point2 user{2.0, 1.0};
  const auto h = node_channel(cfg, vec({0.0}), user);
  const double du = std::sqrt(4.0 + 1.0 + 9.0);
  CHECK(std::abs(h[0]) == doctest::Approx(cfg.eta() / du).epsilon(1e-12));
  const double expected = -2.0 * kPi * du / cfg.wavelength();
  CHECK(std::remainder(std::arg(h[0]) - expected, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("coherent pair") {
  auto cfg = base();
  cfg.attenuation = 0.0;
  // Both antennas symmetric about the node, guided phases differing by one guided wavelength.
  cfg.feed_point = 0.0;
  const double lg = cfg.guided_wavelength();
  const double x1 = 2.0, x2 = 2.0 + lg;
  const Point2 node{0.5 * (x1 + x2), 1.0};
  const auto h = node_channel(cfg, vec({x1, x2}), node);
  const double dist = std::sqrt(0.25 * lg * lg + 1.0 + 9.0);
  CHECK(coherent_gain(h) == doctest::Approx(2.0 * std::pow(cfg.eta() / dist, 2)).epsilon(1e-9));
}

TEST_CASE("frozen scalar evaluations") {
  const auto cfg = base();
  const auto h = node_channel(cfg, vec({1.0}), {3.0, 2.0});
  CHECK(std::abs(h[0]) == doctest::Approx(0.00016109873000868388).epsilon(1e-12));
  CHECK(h[0].real() == doctest::Approx(-5.654721648619933e-05).epsilon(1e-9));
  CHECK(h[0].imag() == doctest::Approx(0.0001508483116182403).epsilon(1e-9));
  const auto he = node_channel(cfg, vec({4.7}), cfg.target_position);
  CHECK(he[0].real() == doctest::Approx(-8.726034683428454e-06).epsilon(1e-8));
  CHECK(he[0].imag() == doctest::Approx(5.7792037277592713e-05).epsilon(1e-8));
  CHECK(psi_gain(cfg) == doctest::Approx(857466464.3530624).epsilon(1e-12));
  CHECK(comm_snr(cfg, vec({2.1, 2.23, 2.31, 2.4}), 1) == doctest::Approx(9000888.038887803).epsilon(1e-8));
}

TEST_CASE("comm snr basics") {
  auto cfg = base();
  AntennaLayout layout = uniform_layout(cfg);
  const double g = comm_snr(cfg, layout, 2, 0);
  cfg.transmit_power *= 3.0;
  CHECK(comm_snr(cfg, layout, 2, 0) == doctest::Approx(3.0 * g).epsilon(1e-12));
  cfg.antennas_per_cluster = 1;
  const auto h = node_channel(cfg, vec({1.3}), cfg.user_positions[0]);
  CHECK(comm_snr(cfg, vec({1.3}), 0) ==
        doctest::Approx(cfg.transmit_power / cfg.noise_power * std::norm(h[0])).epsilon(1e-12));
}

TEST_CASE("psi scaling") {
  auto cfg = base();
  cfg.receive_antennas = 1;
  cfg.feed_point = 0.0;
  cfg.height = 0.6;
  cfg.target_position = {0.0, 0.8};
  cfg.transmit_power = 1.0;
  cfg.noise_power = 1.0;
  CHECK(psi_gain(cfg) == doctest::Approx(cfg.eta() * cfg.eta()).epsilon(1e-12));
  const double p1 = psi_gain(cfg);
  cfg.receive_antennas = 2;
  CHECK(psi_gain(cfg) == doctest::Approx(2.0 * p1).epsilon(1e-14));
}

TEST_CASE("sensing weights") {
  const auto cfg = base();
  const auto layout = uniform_layout(cfg);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cfg.num_clusters, 2);
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  SUBCASE("zero time") {
    CHECK(sensing_weights(cfg, layout, b, Eigen::Vector2d::Zero()).q.isZero());
  }
  SUBCASE("equal slots match the term oracle") {
    const Eigen::Vector2d tau(cfg.total_time / 2, cfg.total_time / 2);
    const auto w = sensing_weights(cfg, layout, b, tau);
    CHECK(w.q[0] == doctest::Approx(5.743071664045308).epsilon(1e-9));
    CHECK(w.q[1] == doctest::Approx(7.6674312981134305).epsilon(1e-9));
    CHECK(w.q.tail(cfg.num_clusters - 2).isZero());
    CHECK(w.Q()(1, 1) == w.q[1]);
  }
  SUBCASE("single slot") {
    Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(cfg.num_clusters, 1);
    b1(0, 0) = 1.0;
    Eigen::VectorXd tau(1);
    tau[0] = cfg.total_time;
    const auto w = sensing_weights(cfg, layout, b1, tau);
    CHECK(w.q[0] == doctest::Approx(psi_gain(cfg) * sensing_gain(cfg, layout.clusters[0])));
  }
  SUBCASE("invalid b") {
    Eigen::MatrixXd bad = b;
    bad(2, 0) = 0.5;
    CHECK_THROWS_AS(sensing_weights(cfg, layout, bad, Eigen::Vector2d::Ones()), std::invalid_argument);
  }
}

TEST_CASE("coherent ceiling holds on random layouts") {
  const auto cfg = base();
  unsigned state = 7;
  auto uni = [&] {
    state = state * 1664525u + 1013904223u;
    return (state >> 8) / double(1 << 24);
  };
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(4);
    for (int n = 0; n < 4; ++n) x[n] = cfg.aperture_lo(3) + cfg.aperture * uni();
    const auto h = node_channel(cfg, x, cfg.target_position);
    // N * max (eta e^{-alpha l} / d)^2 equals N^2 * max |h_n|^2 under the 1/sqrt(N) scaling
    CHECK(coherent_gain(h) <= 16.0 * h.cwiseAbs2().maxCoeff() * (1 + 1e-12));
  }
}

TEST_CASE("layout checks") {
  const auto cfg = base();
  auto layout = uniform_layout(cfg);
  CHECK_NOTHROW(check_layout(cfg, layout));
  layout.clusters[1][1] = layout.clusters[1][0] + 0.1 * cfg.min_spacing;
  CHECK_THROWS_AS(check_layout(cfg, layout), std::invalid_argument);
}
