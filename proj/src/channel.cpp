// SPDX-License-Identifier: Apache-2.0
#include "pinch/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinch {

Eigen::VectorXd uniform_positions(const ScenarioConfig& cfg, int m) {
  const int n = cfg.antennas_per_cluster;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = cfg.aperture_lo(m) + (i + 0.5) * cfg.aperture / n;
  return x;
}

AntennaLayout uniform_layout(const ScenarioConfig& cfg) {
  AntennaLayout layout;
  for (int m = 0; m < cfg.num_clusters; ++m) layout.clusters.push_back(uniform_positions(cfg, m));
  return layout;
}

void check_layout(const ScenarioConfig& cfg, const AntennaLayout& layout, double tol) {
  if (static_cast<int>(layout.clusters.size()) != cfg.num_clusters)
    throw std::invalid_argument("layout: cluster count mismatch");
  for (int m = 0; m < cfg.num_clusters; ++m) {
    const auto& x = layout.clusters[m];
    for (int n = 0; n < x.size(); ++n) {
      if (x[n] < cfg.aperture_lo(m) - tol || x[n] > cfg.aperture_hi(m) + tol)
        throw std::invalid_argument("layout: antenna " + std::to_string(n) + " of cluster " + std::to_string(m) +
                                    " outside its aperture");
      if (n > 0 && x[n] - x[n - 1] < cfg.min_spacing - tol)
        throw std::invalid_argument("layout: spacing below d_min in cluster " + std::to_string(m));
    }
  }
}

Eigen::VectorXcd node_channel(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, Point2 node) {
  const double eta = cfg.eta();
  const double kg = 2.0 * kPi / cfg.guided_wavelength();
  const double k0 = 2.0 * kPi / cfg.wavelength();
  const double norm = 1.0 / std::sqrt(static_cast<double>(positions.size()));
  const double base = node.y * node.y + cfg.height * cfg.height;
  Eigen::VectorXcd h(positions.size());
  for (int n = 0; n < positions.size(); ++n) {
    const double dx = positions[n] - node.x;
    const double dist = std::sqrt(dx * dx + base);
    const double guided = std::abs(positions[n] - cfg.feed_point);
    h[n] = std::polar(eta / dist * norm * std::exp(-cfg.attenuation * guided), -(kg * guided + k0 * dist));
  }
  return h;
}

Eigen::VectorXcd comm_channel(const ScenarioConfig& cfg, const AntennaLayout& layout, int m, int k) {
  return node_channel(cfg, layout.clusters.at(m), cfg.user_positions.at(k));
}

Eigen::VectorXcd sensing_channel(const ScenarioConfig& cfg, const AntennaLayout& layout, int m) {
  return node_channel(cfg, layout.clusters.at(m), cfg.target_position);
}

double comm_snr(const ScenarioConfig& cfg, const Eigen::VectorXd& positions, int k) {
  return cfg.transmit_power / cfg.noise_power * coherent_gain(node_channel(cfg, positions, cfg.user_positions.at(k)));
}

double comm_snr(const ScenarioConfig& cfg, const AntennaLayout& layout, int m, int k) {
  return comm_snr(cfg, layout.clusters.at(m), k);
}

double sensing_gain(const ScenarioConfig& cfg, const Eigen::VectorXd& positions) {
  return coherent_gain(node_channel(cfg, positions, cfg.target_position));
}

double psi_gain(const ScenarioConfig& cfg) {
  const double dx = cfg.target_position.x - cfg.feed_point;
  const double der2 = dx * dx + cfg.target_position.y * cfg.target_position.y + cfg.height * cfg.height;
  const double eta = cfg.eta();
  return cfg.transmit_power * eta * eta / (cfg.noise_power * der2) * cfg.receive_antennas;
}

std::vector<int> active_clusters(const Eigen::MatrixXd& b, double tol) {
  std::vector<int> act(b.cols(), -1);
  for (int t = 0; t < b.cols(); ++t) {
    int ones = 0;
    for (int m = 0; m < b.rows(); ++m) {
      const double v = b(m, t);
      if (std::abs(v - 1.0) <= tol) {
        act[t] = m;
        ++ones;
      } else if (std::abs(v) > tol) {
        throw std::invalid_argument("b: slot " + std::to_string(t) + " is not one-hot");
      }
    }
    if (ones != 1) throw std::invalid_argument("b: slot " + std::to_string(t) + " is not one-hot");
  }
  return act;
}

SensingWeights sensing_weights(const ScenarioConfig& cfg, const SlotLayouts& layouts, const Eigen::MatrixXd& b,
                               const Eigen::VectorXd& tau) {
  if (b.rows() != cfg.num_clusters || b.cols() != tau.size() || static_cast<int>(layouts.size()) < tau.size())
    throw std::invalid_argument("sensing_weights: dimension mismatch");
  const auto act = active_clusters(b);
  const double psi = psi_gain(cfg);
  SensingWeights w{Eigen::VectorXd::Zero(cfg.num_clusters)};
  for (int t = 0; t < tau.size(); ++t) {
    const int m = act[t];
    w.q[m] += psi * tau[t] / cfg.total_time * sensing_gain(cfg, layouts[t].clusters.at(m));
  }
  return w;
}

SensingWeights sensing_weights(const ScenarioConfig& cfg, const AntennaLayout& layout, const Eigen::MatrixXd& b,
                               const Eigen::VectorXd& tau) {
  return sensing_weights(cfg, SlotLayouts(tau.size(), layout), b, tau);
}

}  // namespace pinch
