#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "photonbound/analytical/estimator.hpp"
#include "photonbound/channel/forward.hpp"
#include "photonbound/core/poisson.hpp"
#include "photonbound/core/threshold.hpp"
#include "photonbound/qkd/keyrate.hpp"

namespace photonbound {

struct QkdSetup {
  PoissonSource source{{1e-3, 1e-2, 0.5}};
  ThresholdDetector detectors{1e-6, 1.0, {0.94, 0.96, 0.98, 1.0}};
  double flip_probability = 0.05;
  int n0 = 2;
  int m0 = 3;
  std::vector<double> losses_db;  // empty means 0..45 dB in 1 dB steps
  std::vector<Protocol> protocols{Protocol::BB84, Protocol::SixState};
  std::uint64_t shots = 0;  // 0 keeps the exact tables
  std::uint64_t seed = 1;
  EstimatorOptions estimator;

  std::vector<double> loss_grid() const;
  void validate() const;
};

using PatternTable = std::array<std::array<double, 4>, 2>;  // [bit][2*b0 + b1]

struct QkdObservations {
  // No-click probabilities per [basis][bit]: one row per intensity, one
  // column per attenuation pair (eta0 major).
  std::array<std::array<Eigen::MatrixXd, 2>, 3> no_click;
  // All click patterns at the strongest attenuation pair, Z basis, per intensity.
  std::vector<PatternTable> key_patterns;
};

QkdObservations simulate_qkd(const QkdChannelModel& channel, const QkdSetup& setup);

// Receiver made of the two threshold detectors, estimation box m0 per mode.
struct QkdReceiver {
  ThresholdResponse mode0;
  ThresholdResponse mode1;
  ProductReceiver product;

  QkdReceiver(const ThresholdDetector& det, int m0, int scan_orders);
  QkdReceiver(const QkdReceiver&) = delete;
  QkdReceiver& operator=(const QkdReceiver&) = delete;
};

SinglePhotonStats estimate_single_photon_stats(const QkdObservations& obs, const QkdSetup& setup,
                                               const QkdReceiver& receiver);

// One report per (loss, protocol), loss-major.
std::vector<KeyRateReport> run_qkd_sweep(const QkdSetup& setup);

}  // namespace photonbound
