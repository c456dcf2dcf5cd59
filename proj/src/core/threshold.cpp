#include "photonbound/core/threshold.hpp"

#include <cmath>
#include <stdexcept>

namespace photonbound {

void ThresholdDetector::validate() const {
  if (!(dark_count_prob >= 0.0 && dark_count_prob < 1.0)) {
    throw std::invalid_argument("threshold detector: dark count probability must be in [0,1)");
  }
  if (!(single_photon_efficiency > 0.0 && single_photon_efficiency <= 1.0)) {
    throw std::invalid_argument("threshold detector: efficiency must be in (0,1]");
  }
  for (std::size_t i = 0; i < attenuation_levels.size(); ++i) {
    const double nu = attenuation_levels[i];
    if (!(nu > 0.0 && nu <= 1.0)) {
      throw std::invalid_argument("threshold detector: attenuation levels must be in (0,1]");
    }
    if (i > 0 && !(nu > attenuation_levels[i - 1])) {
      throw std::invalid_argument("threshold detector: attenuation levels must be strictly increasing");
    }
  }
}

double threshold_no_click(const ThresholdDetector& det, double nu, int m) {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw std::invalid_argument("threshold_no_click: attenuation must be in (0,1]");
  }
  if (m < 0) throw std::invalid_argument("threshold_no_click: photon count must be >= 0");
  const double keep = 1.0 - nu * det.single_photon_efficiency;
  double r = 1.0 - det.dark_count_prob;
  for (int k = 0; k < m && r != 0.0; ++k) r *= keep;
  return r;
}

double threshold_click(const ThresholdDetector& det, double nu, int m) {
  return 1.0 - threshold_no_click(det, nu, m);
}

}  // namespace photonbound
