#pragma once

#include <vector>

namespace photonbound {

// Click/no-click detector preceded by a variable attenuator.
struct ThresholdDetector {
  double dark_count_prob = 0.0;            // p_dc in [0, 1)
  double single_photon_efficiency = 1.0;   // eta_det in (0, 1]
  std::vector<double> attenuation_levels;  // strictly increasing, in (0, 1]

  void validate() const;
};

// (1 - p_dc)(1 - nu*eta_det)^m, evaluated by repeated multiplication so that
// consecutive orders differ by exactly one factor.
double threshold_no_click(const ThresholdDetector& det, double nu, int m);
double threshold_click(const ThresholdDetector& det, double nu, int m);

}  // namespace photonbound
