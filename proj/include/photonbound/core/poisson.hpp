#pragma once

#include <vector>

namespace photonbound {

// Phase-randomised laser with a set of selectable mean photon numbers.
struct PoissonSource {
  std::vector<double> intensities;  // strictly increasing, >= 0

  double x_max() const { return intensities.empty() ? 0.0 : intensities.back(); }
  std::size_t size() const { return intensities.size(); }
  // Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

// x^n e^{-x} / n!.  Switches to log-space above n = 30.
double poisson_pmf(double x, int n);

// log of poisson_pmf; -inf when the probability is exactly zero.
double log_poisson_pmf(double x, int n);

// Sum_{n > n0} p_n(x), always in [0, 1].
double poisson_tail(double x, int n0);

}  // namespace photonbound
