// SPDX-License-Identifier: Apache-2.0
#include "pinch/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pinch {

namespace {

const std::vector<Point2> kDefaultUsers = {{3.0, 2.0}, {7.0, 8.0}, {2.0, 8.0}, {8.0, 2.0}};

const std::vector<std::string> kKeys = {
    "waveguide_length", "height", "feed_point", "num_clusters", "cluster_centers", "aperture",
    "min_spacing", "antennas_per_cluster", "receive_antennas", "num_users", "user_positions",
    "target_position", "num_slots", "total_time", "min_slot", "carrier", "refractive_index",
    "attenuation", "transmit_power", "noise_power", "snr_threshold", "rate_min", "rcs_mean",
    "rcs_decay"};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioError(ScenarioError::Kind::invariant, field, what);
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be finite and > 0, got " + std::to_string(v));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Point2 point_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ScenarioError(ScenarioError::Kind::parse, field, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  fill_derived_defaults(cfg);
  cfg.min_spacing = 0.5 * cfg.wavelength();
  return cfg;
}

void fill_derived_defaults(ScenarioConfig& cfg) {
  if (static_cast<int>(cfg.cluster_centers.size()) != cfg.num_clusters && cfg.num_clusters > 0) {
    cfg.cluster_centers.resize(cfg.num_clusters);
    for (int m = 0; m < cfg.num_clusters; ++m)
      cfg.cluster_centers[m] = (m + 0.5) * cfg.waveguide_length / cfg.num_clusters;
  }
  if (static_cast<int>(cfg.user_positions.size()) != cfg.num_users && cfg.num_users >= 0 &&
      cfg.num_users <= static_cast<int>(kDefaultUsers.size()))
    cfg.user_positions.assign(kDefaultUsers.begin(), kDefaultUsers.begin() + cfg.num_users);
  if (cfg.num_slots > 0) cfg.min_slot = cfg.total_time / (4.0 * cfg.num_slots);
}

void validate(const ScenarioConfig& c) {
  require_positive("waveguide_length", c.waveguide_length);
  require_positive("height", c.height);
  if (c.num_clusters < 1) fail("num_clusters", "must be >= 1");
  if (c.antennas_per_cluster < 1) fail("antennas_per_cluster", "must be >= 1");
  if (c.receive_antennas < 1) fail("receive_antennas", "must be >= 1");
  if (c.num_users < 0) fail("num_users", "must be >= 0");
  if (c.num_slots < 1) fail("num_slots", "must be >= 1");
  if (static_cast<int>(c.cluster_centers.size()) != c.num_clusters)
    fail("cluster_centers", "length must equal num_clusters");
  if (static_cast<int>(c.user_positions.size()) != c.num_users)
    fail("user_positions", "length must equal num_users");
  require_positive("aperture", c.aperture);
  require_positive("min_spacing", c.min_spacing);
  require_positive("total_time", c.total_time);
  require_positive("min_slot", c.min_slot);
  require_positive("carrier", c.carrier);
  require_positive("refractive_index", c.refractive_index);
  require_positive("transmit_power", c.transmit_power);
  require_positive("noise_power", c.noise_power);
  require_positive("snr_threshold", c.snr_threshold);
  require_positive("rcs_mean", c.rcs_mean);
  if (!(c.attenuation >= 0.0)) fail("attenuation", "must be >= 0");
  if (!(c.rate_min >= 0.0)) fail("rate_min", "must be >= 0");
  if (!(c.rcs_decay >= 0.0)) fail("rcs_decay", "must be >= 0");
  const double eps = 1e-12;
  for (int m = 0; m < c.num_clusters; ++m) {
    if (c.aperture_lo(m) < -eps || c.aperture_hi(m) > c.waveguide_length + eps)
      fail("cluster_centers", "aperture of cluster " + std::to_string(m) + " leaves [0, " +
                                  fmt(c.waveguide_length) + "]");
    if (m > 0 && c.aperture_lo(m) < c.aperture_hi(m - 1) - eps)
      fail("cluster_centers", "apertures of clusters " + std::to_string(m - 1) + " and " +
                                  std::to_string(m) + " overlap or are unsorted");
  }
  if ((c.antennas_per_cluster - 1) * c.min_spacing > c.aperture + eps)
    fail("min_spacing", "(N_T - 1) * d_min = " + fmt((c.antennas_per_cluster - 1) * c.min_spacing) +
                            " exceeds aperture " + fmt(c.aperture));
  if (c.num_slots * c.min_slot > c.total_time * (1.0 + 1e-12))
    fail("min_slot", "T * T_min = " + fmt(c.num_slots * c.min_slot) + " exceeds total_time " +
                         fmt(c.total_time));
  if (c.feed_point > c.aperture_lo(0) + eps)
    fail("feed_point", "feed must lie left of every cluster aperture");
}

LoadedScenario load_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(ScenarioError::Kind::parse, "", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError(ScenarioError::Kind::parse, "", "top level must be an object");
  const std::set<std::string> known(kKeys.begin(), kKeys.end());
  for (const auto& item : doc.items())
    if (!known.count(item.key())) throw ScenarioError(ScenarioError::Kind::parse, item.key(), "unknown key");

  LoadedScenario out;
  ScenarioConfig& c = out.config;
  auto num = [&](const char* key, double& dst) {
    if (!doc.contains(key)) {
      out.defaults_applied.emplace_back(key);
      return;
    }
    if (!doc[key].is_number()) throw ScenarioError(ScenarioError::Kind::parse, key, "expected a number");
    dst = doc[key].get<double>();
  };
  auto count = [&](const char* key, int& dst) {
    if (!doc.contains(key)) {
      out.defaults_applied.emplace_back(key);
      return;
    }
    if (!doc[key].is_number_integer()) throw ScenarioError(ScenarioError::Kind::parse, key, "expected an integer");
    dst = doc[key].get<int>();
  };

  num("waveguide_length", c.waveguide_length);
  num("height", c.height);
  num("feed_point", c.feed_point);
  count("num_clusters", c.num_clusters);
  num("aperture", c.aperture);
  count("antennas_per_cluster", c.antennas_per_cluster);
  count("receive_antennas", c.receive_antennas);
  count("num_users", c.num_users);
  count("num_slots", c.num_slots);
  num("total_time", c.total_time);
  num("carrier", c.carrier);
  num("refractive_index", c.refractive_index);
  num("attenuation", c.attenuation);
  num("transmit_power", c.transmit_power);
  num("noise_power", c.noise_power);
  num("snr_threshold", c.snr_threshold);
  num("rate_min", c.rate_min);
  num("rcs_mean", c.rcs_mean);
  num("rcs_decay", c.rcs_decay);

  if (doc.contains("cluster_centers")) {
    const auto& j = doc["cluster_centers"];
    if (!j.is_array()) throw ScenarioError(ScenarioError::Kind::parse, "cluster_centers", "expected an array");
    c.cluster_centers.clear();
    for (const auto& v : j) {
      if (!v.is_number()) throw ScenarioError(ScenarioError::Kind::parse, "cluster_centers", "expected numbers");
      c.cluster_centers.push_back(v.get<double>());
    }
  } else {
    out.defaults_applied.emplace_back("cluster_centers");
    c.cluster_centers.clear();
  }
  if (doc.contains("user_positions")) {
    const auto& j = doc["user_positions"];
    if (!j.is_array()) throw ScenarioError(ScenarioError::Kind::parse, "user_positions", "expected an array");
    c.user_positions.clear();
    for (const auto& v : j) c.user_positions.push_back(point_from(v, "user_positions"));
  } else {
    out.defaults_applied.emplace_back("user_positions");
    c.user_positions.clear();
  }
  if (doc.contains("target_position"))
    c.target_position = point_from(doc["target_position"], "target_position");
  else
    out.defaults_applied.emplace_back("target_position");

  // Defaults that depend on other fields.
  const double min_slot_default = c.num_slots > 0 ? c.total_time / (4.0 * c.num_slots) : c.min_slot;
  if (!doc.contains("cluster_centers")) {
    c.cluster_centers.resize(std::max(c.num_clusters, 0));
    for (int m = 0; m < c.num_clusters; ++m)
      c.cluster_centers[m] = (m + 0.5) * c.waveguide_length / c.num_clusters;
  }
  if (!doc.contains("user_positions") && c.num_users >= 0 &&
      c.num_users <= static_cast<int>(kDefaultUsers.size()))
    c.user_positions.assign(kDefaultUsers.begin(), kDefaultUsers.begin() + c.num_users);
  c.min_slot = min_slot_default;
  num("min_slot", c.min_slot);
  c.min_spacing = 0.5 * c.wavelength();
  num("min_spacing", c.min_spacing);
  if (doc.contains("user_positions") == false && static_cast<int>(c.user_positions.size()) != c.num_users)
    fail("user_positions", "no default positions for " + std::to_string(c.num_users) + " users");

  validate(c);
  return out;
}

LoadedScenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::parse, "", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["waveguide_length"] = c.waveguide_length;
  j["height"] = c.height;
  j["feed_point"] = c.feed_point;
  j["num_clusters"] = c.num_clusters;
  j["cluster_centers"] = c.cluster_centers;
  j["aperture"] = c.aperture;
  j["min_spacing"] = c.min_spacing;
  j["antennas_per_cluster"] = c.antennas_per_cluster;
  j["receive_antennas"] = c.receive_antennas;
  j["num_users"] = c.num_users;
  nlohmann::json users = nlohmann::json::array();
  for (const auto& p : c.user_positions) users.push_back({p.x, p.y});
  j["user_positions"] = users;
  j["target_position"] = {c.target_position.x, c.target_position.y};
  j["num_slots"] = c.num_slots;
  j["total_time"] = c.total_time;
  j["min_slot"] = c.min_slot;
  j["carrier"] = c.carrier;
  j["refractive_index"] = c.refractive_index;
  j["attenuation"] = c.attenuation;
  j["transmit_power"] = c.transmit_power;
  j["noise_power"] = c.noise_power;
  j["snr_threshold"] = c.snr_threshold;
  j["rate_min"] = c.rate_min;
  j["rcs_mean"] = c.rcs_mean;
  j["rcs_decay"] = c.rcs_decay;
  return j;
}

double look_angle_at(const ScenarioConfig& cfg, double x) {
  return std::atan2(cfg.target_position.y, cfg.target_position.x - x);
}

double look_angle(const ScenarioConfig& cfg, int m) { return look_angle_at(cfg, cfg.cluster_centers.at(m)); }

double receive_angle(const ScenarioConfig& cfg) { return look_angle_at(cfg, cfg.feed_point); }

Eigen::VectorXcd receive_steering(const ScenarioConfig& cfg, double theta) {
  Eigen::VectorXcd a(cfg.receive_antennas);
  const double c = std::cos(theta);
  for (int i = 0; i < cfg.receive_antennas; ++i) a[i] = std::polar(1.0, -kPi * i * c);
  return a;
}

}  // namespace pinch
