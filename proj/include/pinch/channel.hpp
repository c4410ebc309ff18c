// SPDX-License-Identifier: Apache-2.0
// Guided plus free-space channel model and the derived SNR quantities.
#pragma once

#include "pinch/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace pinch {

// Antenna positions along x, one sorted vector of length N_T per cluster.
struct AntennaLayout {
  std::vector<Eigen::VectorXd> clusters;
};

// Per-slot layouts; slot t uses layouts[t].
using SlotLayouts = std::vector<AntennaLayout>;

struct SensingWeights {
  Eigen::VectorXd q;
  Eigen::MatrixXd Q() const { return q.asDiagonal(); }
};

// Cell-centered even spacing inside every aperture.
AntennaLayout uniform_layout(const ScenarioConfig& cfg);
Eigen::VectorXd uniform_positions(const ScenarioConfig& cfg, int m);

// Throws std::invalid_argument if positions leave the aperture or violate d_min.
void check_layout(const ScenarioConfig& cfg, const AntennaLayout& layout, double tol = 1e-9);

// Channel from the antennas at `positions` to a ground node, with the 1/sqrt(N) normalization.
Eigen::VectorXcd node_channel(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, Point2 node);
Eigen::VectorXcd comm_channel(const ScenarioConfig& cfg, const AntennaLayout& layout, int m, int k);
Eigen::VectorXcd sensing_channel(const ScenarioConfig& cfg, const AntennaLayout& layout, int m);

inline double coherent_gain(const Eigen::VectorXcd& h) { return std::norm(h.sum()); }

double comm_snr(const ScenarioConfig& cfg, const AntennaLayout& layout, int m, int k);
double comm_snr(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, int k);
// |sum_n h_e|^2 for the antennas at `positions`.
double sensing_gain(const ScenarioConfig& cfg, const Eigen::VectorXd& positions);

double psi_gain(const ScenarioConfig& cfg);

// b is M x T with one-hot columns; tau has length T.
SensingWeights sensing_weights(const ScenarioConfig& cfg, const SlotLayouts& layouts, const Eigen::MatrixXd& b,
                               const Eigen::VectorXd& tau);
SensingWeights sensing_weights(const ScenarioConfig& cfg, const AntennaLayout& layout, const Eigen::MatrixXd& b,
                               const Eigen::VectorXd& tau);

// Active cluster per slot; throws std::invalid_argument unless every column is one-hot.
std::vector<int> active_clusters(const Eigen::MatrixXd& b, double tol = 1e-9);

}  // namespace pinch
