#pragma once

#include <vector>

namespace photonbound {

// Phase-randomised homodyne detector whose outcomes are folded onto |y| and
// binned.
struct HomodyneDetector {
  double efficiency = 1.0;        // eta in (0, 1]
  std::vector<double> bin_edges;  // 0 = e_0 < e_1 < ... < e_B = y_max

  double outcome_max() const { return bin_edges.empty() ? 0.0 : bin_edges.back(); }
  std::size_t bin_count() const { return bin_edges.empty() ? 0 : bin_edges.size() - 1; }
  void validate() const;

  static HomodyneDetector uniform(double efficiency, double y_max, int bins);
};

// C(m,k) eta^k (1-eta)^(m-k) for k = 0..m.  Log-space above m = 60.
std::vector<double> binomial_weights(int m, double eta);

// A_m(|y|).  eta may be anywhere in [0, 1] here.
double homodyne_density(const HomodyneDetector& det, int m, double y);

// 2 * integral of A_m over [lo, hi] on |y|.  hi may be +infinity.
double homodyne_bin_prob(const HomodyneDetector& det, int m, double lo, double hi);

// max over [0, y_max] of a_k^2 for k = 0..max_order, sampled at step 1e-3
// and inflated by 1%.
std::vector<double> hermite_square_maxima(int max_order, double y_max);

// G_m(y) >= A_m(y): binomial mixture of g_k, with the sampled maxima standing
// in for orders where g_k is undefined at y.
double homodyne_envelope(const HomodyneDetector& det, int m, double y);

}  // namespace photonbound
