#include "photonbound/qkd/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace photonbound {

double decoy_baseline_error(std::span<const double> intensities, std::span<const GainQber> observed) {
  const std::size_t k = intensities.size();
  if (k < 2 || observed.size() != k) {
    throw std::invalid_argument("decoy baseline: need gain/QBER for at least two intensities");
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (!(intensities[i] > intensities[i - 1])) {
      throw std::invalid_argument("decoy baseline: intensities must be strictly increasing");
    }
  }
  const double mu = intensities[k - 1];
  const double nu = intensities[k - 2];
  const double q_mu = observed[k - 1].gain * std::exp(mu);
  const double q_nu = observed[k - 2].gain * std::exp(nu);

  // vacuum yield: Y0 <= Q_w e^w for the weakest w; the lower bound follows
  // from the two weakest intensities
  double y0_lo = 0.0;
  double y0_hi = observed[0].gain * std::exp(intensities[0]);
  if (k >= 3) {
    const double w = intensities[0];
    const double q_w = observed[0].gain * std::exp(w);
    y0_lo = std::max(0.0, (nu * q_w - w * q_nu) / (nu - w));
  }

  const double y1_lo =
      mu / (mu * nu - nu * nu) * (q_nu - q_mu * nu * nu / (mu * mu) - (mu * mu - nu * nu) / (mu * mu) * y0_hi);
  const double denom = nu * y1_lo;
  if (!(denom > 0.0)) return 1.0;
  const double e1 = (observed[k - 2].qber * q_nu - 0.5 * y0_lo) / denom;
  return std::clamp(e1, 0.0, 1.0);
}

}  // namespace photonbound
