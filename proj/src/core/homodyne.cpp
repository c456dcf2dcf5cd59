#include "photonbound/core/homodyne.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "photonbound/core/hermite.hpp"
#include "photonbound/core/quadrature.hpp"

namespace photonbound {

void HomodyneDetector::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("homodyne detector: efficiency must be in (0,1]");
  }
  if (bin_edges.size() < 2) throw std::invalid_argument("homodyne detector: need at least one bin");
  if (bin_edges.front() != 0.0) {
    throw std::invalid_argument("homodyne detector: bins must start at 0");
  }
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1]) || !std::isfinite(bin_edges[i])) {
      throw std::invalid_argument("homodyne detector: bin edges must be finite and strictly increasing");
    }
  }
}

HomodyneDetector HomodyneDetector::uniform(double efficiency, double y_max, int bins) {
  if (bins < 1 || !(y_max > 0.0)) throw std::invalid_argument("homodyne detector: bad uniform grid");
  HomodyneDetector det;
  det.efficiency = efficiency;
  det.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) det.bin_edges[i] = y_max * i / bins;
  det.bin_edges.back() = y_max;
  return det;
}

std::vector<double> binomial_weights(int m, double eta) {
  if (m < 0) throw std::invalid_argument("binomial_weights: order must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("binomial_weights: eta must be in [0,1]");
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
  if (eta == 0.0) {
    w[0] = 1.0;
    return w;
  }
  if (eta == 1.0) {
    w[m] = 1.0;
    return w;
  }
  if (m <= 60) {
    double c = 1.0;
    for (int k = 0; k <= m; ++k) {
      w[k] = c * std::pow(eta, k) * std::pow(1.0 - eta, m - k);
      c = c * (m - k) / (k + 1);
    }
    return w;
  }
  const double le = std::log(eta);
  const double lq = std::log1p(-eta);
  const double lgm = std::lgamma(m + 1.0);
  for (int k = 0; k <= m; ++k) {
    w[k] = std::exp(lgm - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * le + (m - k) * lq);
  }
  return w;
}

double homodyne_density(const HomodyneDetector& det, int m, double y) {
  const std::vector<double> w = binomial_weights(m, det.efficiency);
  const std::vector<double> a = hermite_values(m, std::abs(y));
  double s = 0.0;
  for (int k = 0; k <= m; ++k) s += w[k] * a[k] * a[k];
  return s;
}

double homodyne_bin_prob(const HomodyneDetector& det, int m, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi >= lo) || std::isnan(hi)) {
    throw std::invalid_argument("homodyne_bin_prob: bin must satisfy 0 <= lo <= hi");
  }
  if (m < 0) throw std::invalid_argument("homodyne_bin_prob: photon count must be >= 0");
  // Beyond sqrt(2m+1) + 12 every a_k^2 is below 1e-60.
  const double cut = std::sqrt(2.0 * m + 1.0) + 12.0;
  hi = std::min(hi, cut);
  if (hi <= lo) return 0.0;
  const std::vector<double> w = binomial_weights(m, det.efficiency);
  auto f = [&](double y, Eigen::VectorXd& out) {
    const std::vector<double> a = hermite_values(m, y);
    double s = 0.0;
    for (int k = 0; k <= m; ++k) s += w[k] * a[k] * a[k];
    out(0) = 2.0 * s;
  };
  return integrate(f, 1, lo, hi).value(0);
}

std::vector<double> hermite_square_maxima(int max_order, double y_max) {
  if (max_order < 0) return {};
  std::vector<double> best(static_cast<std::size_t>(max_order) + 1, 0.0);
  const long steps = static_cast<long>(std::ceil(y_max / 1e-3));
  for (long i = 0; i <= steps; ++i) {
    const double y = std::min(y_max, i * 1e-3);
    const std::vector<double> a = hermite_values(max_order, y);
    for (int k = 0; k <= max_order; ++k) best[k] = std::max(best[k], a[k] * a[k]);
  }
  for (double& b : best) b *= 1.01;
  return best;
}

double homodyne_envelope(const HomodyneDetector& det, int m, double y) {
  y = std::abs(y);
  const std::vector<double> w = binomial_weights(m, det.efficiency);
  const std::vector<double> a = hermite_values(m, y);
  std::vector<double> patch;
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    if (w[k] == 0.0) continue;
    double gk;
    if (2.0 * k + 1.0 - y * y > 0.0) {
      const double d = hermite_derivative(k, y, k > 0 ? a[k - 1] : 0.0, a[k]);
      gk = szego_g(k, y, a[k], d);
    } else {
      if (patch.empty()) patch = hermite_square_maxima(m, std::max(y, det.outcome_max()));
      gk = patch[k];
    }
    s += w[k] * gk;
  }
  return s;
}

}  // namespace photonbound
