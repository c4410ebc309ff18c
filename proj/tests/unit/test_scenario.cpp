// SPDX-License-Identifier: Apache-2.0
#include "pinch/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pinch;

namespace {
bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

const char* kDefaults = R"({
  "waveguide_length": 10, "num_clusters": 10, "num_users": 2, "total_time": 0.008,
  "receive_antennas": 8, "snr_threshold": 10, "noise_power": 1e-12, "rcs_mean": 1,
  "carrier": 3e10, "attenuation": 0.18, "refractive_index": 1.4, "height": 3
})";
}  // namespace

TEST_CASE("default-parameter document loads") {
  const auto loaded = load_scenario(kDefaults);
  const auto& c = loaded.config;
  CHECK(c.waveguide_length == 10.0);
  CHECK(c.num_clusters == 10);
  CHECK(c.num_users == 2);
  CHECK(c.total_time == doctest::Approx(8e-3));
  CHECK(c.receive_antennas == 8);
  CHECK(c.snr_threshold == 10.0);
  CHECK(c.noise_power == 1e-12);
  CHECK(c.carrier == 30e9);
  CHECK(c.height == 3.0);
  CHECK(c.wavelength() == doctest::Approx(0.00999308).epsilon(1e-6));
  CHECK(c.min_spacing == doctest::Approx(0.5 * c.wavelength()));
  CHECK(c.min_slot == doctest::Approx(8e-3 / 16));
  CHECK(c.cluster_centers.front() == doctest::Approx(0.5));
  CHECK(c.cluster_centers.back() == doctest::Approx(9.5));
}

TEST_CASE("missing kappa reports default") {
  const auto loaded = load_scenario(kDefaults);
  CHECK(loaded.config.rcs_decay == 0.1);
  CHECK(has(loaded.defaults_applied, "rcs_decay"));
  CHECK_FALSE(has(loaded.defaults_applied, "carrier"));
}

TEST_CASE("slot budget violation is rejected") {
  try {
    load_scenario(R"({"num_slots": 4, "min_slot": 0.003})");
    FAIL("expected an invariant error");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioError::Kind::invariant);
    CHECK(e.field() == "min_slot");
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(load_scenario("{not json"), ScenarioError);
  try {
    load_scenario(R"({"bogus": 1})");
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioError::Kind::parse);
  }
  CHECK_THROWS_AS(load_scenario(R"({"num_clusters": 2.5})"), ScenarioError);
}

TEST_CASE("overlapping apertures are rejected") {
  CHECK_THROWS_AS(load_scenario(R"({"num_clusters": 2, "cluster_centers": [1.0, 1.2]})"), ScenarioError);
  CHECK_THROWS_AS(load_scenario(R"({"num_clusters": 1, "cluster_centers": [0.1]})"), ScenarioError);
  CHECK_THROWS_AS(load_scenario(R"({"antennas_per_cluster": 4, "aperture": 0.01})"), ScenarioError);
}

TEST_CASE("round trip through json") {
  auto cfg = default_scenario();
  cfg.rcs_decay = 0.3;
  const auto back = load_scenario(to_json(cfg).dump()).config;
  CHECK(to_json(back) == to_json(cfg));
  CHECK(load_scenario(to_json(cfg).dump()).defaults_applied.empty());
}

TEST_CASE("look angle") {
  auto cfg = default_scenario();
  cfg.cluster_centers[3] = 5.0;
  CHECK(look_angle(cfg, 3) == doctest::Approx(kPi / 2));
  cfg.target_position = {5.0, 0.0};
  cfg.cluster_centers[3] = 2.0;
  CHECK(look_angle(cfg, 3) == doctest::Approx(0.0));
  cfg.target_position = {5.0, 5.0};
  // atan2(5, 3) evaluated independently
  CHECK(look_angle(cfg, 3) == doctest::Approx(1.0303768265243125).epsilon(1e-12));
  // strictly increasing in the center position when y_e > 0
  double prev = -1.0;
  for (double x = 0.0; x <= 10.0; x += 0.5) {
    const double th = look_angle_at(cfg, x);
    CHECK(th > prev);
    prev = th;
  }
}

TEST_CASE("receive steering") {
  auto cfg = default_scenario();
  cfg.receive_antennas = 1;
  CHECK(std::abs(receive_steering(cfg, 0.3)[0] - std::complex<double>(1.0, 0.0)) < 1e-15);
  cfg.receive_antennas = 8;
  const auto a = receive_steering(cfg, kPi / 2);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(a[i] - std::complex<double>(1.0, 0.0)) < 1e-12);
  for (double th : {0.1, 0.7, 2.0, 3.0}) CHECK(receive_steering(cfg, th).squaredNorm() == doctest::Approx(8.0));
}
