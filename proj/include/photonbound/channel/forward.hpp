#pragma once

#include <vector>

#include "photonbound/analytical/measurement_table.hpp"
#include "photonbound/core/poisson.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/core/threshold.hpp"

namespace photonbound {

// Pure loss: C(n,m) t^m (1-t)^(n-m).
double loss_q(double t, int m, int n);

// Per-photon trinomial: kept in the right mode with t(1-e), flipped into the
// other mode with t*e, lost with 1-t.
struct QkdChannelModel {
  double transmittance = 1.0;
  double flip_probability = 0.0;

  static QkdChannelModel from_loss_db(double loss_db, double flip_probability);
  void validate() const;
};

// k photons in the prepared mode and l in the orthogonal one, given n sent.
double qkd_q(const QkdChannelModel& channel, int k, int l, int n);

// Two threshold detectors (one per mode) with click pattern (b0, b1) for bit
// value a; the prepared mode is mode a.
double qkd_forward_f(const QkdChannelModel& channel, const ThresholdDetector& detectors, int b0, int b1, int a,
                     double mu, double eta0, double eta1);

// Fluorescence decay observed through a pulsed excitation.
struct TcspcScene {
  double excitation_time = 50.0;  // t_0, ns
  double decay_time = 100.0;      // tau, ns
  double bin_duration = 5.0;      // T, ns
  double excitation_coefficient = 0.9;
  double time_start = 0.0;
  double time_stop = 500.0;  // exclusive

  std::vector<double> time_bins() const;
  void validate() const;
};

double tcspc_energy(const TcspcScene& scene, double t);
double tcspc_q(const TcspcScene& scene, double t, int n);
// Folded homodyne mass per bin at time t.
std::vector<double> tcspc_pdf(const TcspcScene& scene, double t, const HomodyneResponse& detector);

// Exact tables for a pure-loss channel in front of the detector.
MeasurementTable loss_table(double t, const PoissonSource& source, const ThresholdResponse& detector);
MeasurementTable loss_table(double t, const PoissonSource& source, const HomodyneResponse& detector);

// Smallest n_max with poisson_tail(x, n_max) below `tail`.
int series_cutoff(double x, double tail = 1e-17);

}  // namespace photonbound
