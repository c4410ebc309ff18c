// SPDX-License-Identifier: Apache-2.0
// Scenario configuration and geometry helpers.
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinch {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPi = 3.14159265358979323846;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Raised for malformed documents and violated invariants.
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { parse, invariant };
  ScenarioError(Kind kind, const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), kind_(kind), field_(field) {}
  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::string field_;
};

// All physical quantities in SI units. Indices are zero-based throughout the library.
struct ScenarioConfig {
  double waveguide_length = 10.0;    // D_x
  double height = 3.0;               // d
  double feed_point = 0.0;           // x0
  int num_clusters = 10;             // M
  std::vector<double> cluster_centers;
  double aperture = 0.5;             // L
  double min_spacing = 0.005;        // d_min
  int antennas_per_cluster = 4;      // N_T
  int receive_antennas = 8;          // N_R
  int num_users = 2;                 // K
  std::vector<Point2> user_positions;
  Point2 target_position{5.0, 5.0};
  int num_slots = 4;                 // T
  double total_time = 8e-3;          // T_max
  double min_slot = 5e-4;            // T_min
  double carrier = 30e9;             // f_c
  double refractive_index = 1.4;     // n_eff
  double attenuation = 0.18;         // alpha
  double transmit_power = 1e4;       // p_T
  double noise_power = 1e-12;        // sigma^2
  double snr_threshold = 10.0;       // Gamma_th
  double rate_min = 0.5;             // R_min
  double rcs_mean = 1.0;             // zeta_av
  double rcs_decay = 0.1;            // kappa

  double wavelength() const { return kSpeedOfLight / carrier; }
  double guided_wavelength() const { return wavelength() / refractive_index; }
  double eta() const { return kSpeedOfLight / (4.0 * kPi * carrier); }
  // Left and right aperture edges of cluster m.
  double aperture_lo(int m) const { return cluster_centers.at(m) - 0.5 * aperture; }
  double aperture_hi(int m) const { return cluster_centers.at(m) + 0.5 * aperture; }
  int total_antennas() const { return num_clusters * antennas_per_cluster; }
};

struct LoadedScenario {
  ScenarioConfig config;
  std::vector<std::string> defaults_applied;
};

// Default system parameters plus the documented defaults for everything left open.
ScenarioConfig default_scenario();

// Recomputes derived defaults (cluster centers, users, spacing, T_min) after the counts change.
void fill_derived_defaults(ScenarioConfig& cfg);

void validate(const ScenarioConfig& cfg);

LoadedScenario load_scenario(const std::string& text);
LoadedScenario load_scenario_file(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

// Ground-plane angle from cluster m's center to the target, measured from +x.
double look_angle(const ScenarioConfig& cfg, int m);
// Same rule evaluated at an arbitrary point on the waveguide.
double look_angle_at(const ScenarioConfig& cfg, double x);
// Angle of the target seen from the receive array at the feed point.
double receive_angle(const ScenarioConfig& cfg);
Eigen::VectorXcd receive_steering(const ScenarioConfig& cfg, double theta);

}  // namespace pinch
