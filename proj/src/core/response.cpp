#include "photonbound/core/response.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonbound/core/hermite.hpp"
#include "photonbound/core/quadrature.hpp"

namespace photonbound {

ThresholdResponse::ThresholdResponse(ThresholdDetector det) : det_(std::move(det)) {
  det_.validate();
}

double ThresholdResponse::response(int m, std::size_t j) const {
  return threshold_no_click(det_, det_.attenuation_levels.at(j), m);
}

double ThresholdResponse::truncation_slack(double source_tail, int m_c, std::size_t j) const {
  const double nu = det_.attenuation_levels.at(j);
  const double keep = std::pow(1.0 - nu * det_.single_photon_efficiency, m_c + 1);
  return source_tail * (1.0 - det_.dark_count_prob) + (1.0 - source_tail) * keep;
}

HomodyneResponse::HomodyneResponse(HomodyneDetector det, int max_order)
    : det_(std::move(det)), max_order_(max_order) {
  det_.validate();
  if (max_order_ < 0) throw std::invalid_argument("homodyne response: order must be >= 0");

  const double y_max = det_.outcome_max();
  szego_order_ = static_cast<int>(std::ceil(0.5 * (y_max * y_max + 1.0)));
  while (2.0 * szego_order_ - y_max * y_max < 1.0) ++szego_order_;
  const int top = std::max(max_order_, szego_order_);
  const int k_dim = max_order_ + 1;

  std::vector<double> patch = hermite_square_maxima(szego_order_ - 1, y_max);
  // running max from the top so the patched bounds are non-increasing in k
  for (int k = szego_order_ - 2; k >= 0; --k) patch[k] = std::max(patch[k], patch[k + 1]);

  // Components 0..K-1: a_k^2.  Components K..2K-1: majorant integrand phi_k.
  auto integrand = [&](double y, Eigen::VectorXd& out) {
    const std::vector<double> a = hermite_values(top, y);
    const double d_s = hermite_derivative(szego_order_, y, szego_order_ > 0 ? a[szego_order_ - 1] : 0.0,
                                          a[szego_order_]);
    const double g_s = szego_g(szego_order_, y, a[szego_order_], d_s);
    for (int k = 0; k < k_dim; ++k) {
      out(k) = 2.0 * a[k] * a[k];
      double phi;
      if (k >= szego_order_) {
        const double d = hermite_derivative(k, y, k > 0 ? a[k - 1] : 0.0, a[k]);
        phi = szego_g(k, y, a[k], d);
      } else {
        phi = std::max(patch[k], g_s);
      }
      out(k_dim + k) = 2.0 * phi;
    }
  };

  const std::size_t bins = det_.bin_count();
  Eigen::MatrixXd hermite_mass(k_dim, bins);
  Eigen::MatrixXd phi_mass(k_dim, bins);
  for (std::size_t j = 0; j < bins; ++j) {
    const QuadratureResult r = integrate(integrand, 2 * k_dim, det_.bin_edges[j], det_.bin_edges[j + 1]);
    hermite_mass.col(j) = r.value.head(k_dim);
    phi_mass.col(j) = r.value.tail(k_dim) + r.error.tail(k_dim);
  }

  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(k_dim, k_dim);
  for (int m = 0; m < k_dim; ++m) {
    const std::vector<double> w = binomial_weights(m, det_.efficiency);
    for (int k = 0; k <= m; ++k) weights(m, k) = w[k];
  }
  response_ = weights * hermite_mass;
  // Small relative inflation absorbs rounding in the mixture sums.
  majorant_ = (weights * phi_mass) * (1.0 + 1e-12);
}

void HomodyneResponse::check(int m, std::size_t j) const {
  if (m < 0 || m > max_order_) {
    throw std::out_of_range("homodyne response: order " + std::to_string(m) + " outside tabulated range 0.." +
                            std::to_string(max_order_));
  }
  if (j >= det_.bin_count()) throw std::out_of_range("homodyne response: bin index out of range");
}

double HomodyneResponse::response(int m, std::size_t j) const {
  check(m, j);
  return response_(m, static_cast<Eigen::Index>(j));
}

double HomodyneResponse::tail_majorant(int m, std::size_t j) const {
  check(m, j);
  return majorant_(m, static_cast<Eigen::Index>(j));
}

double HomodyneResponse::truncation_slack(double source_tail, int m_c, std::size_t j) const {
  const double sup_bound = std::min(1.0, tail_majorant(0, j));
  return source_tail * sup_bound + tail_majorant(m_c + 1, j);
}

}  // namespace photonbound
