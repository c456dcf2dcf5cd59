#include "photonbound/core/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace photonbound {
namespace {

constexpr int kLogSpaceThreshold = 30;

void check_args(double x, int n) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("poisson: mean photon number must be finite and >= 0, got " +
                                std::to_string(x));
  }
  if (n < 0) throw std::invalid_argument("poisson: photon count must be >= 0");
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

void PoissonSource::validate() const {
  if (intensities.empty()) throw std::invalid_argument("source: no intensities");
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    if (!(intensities[i] >= 0.0) || !std::isfinite(intensities[i])) {
      throw std::invalid_argument("source: intensities must be finite and >= 0");
    }
    if (i > 0 && !(intensities[i] > intensities[i - 1])) {
      throw std::invalid_argument("source: intensities must be strictly increasing");
    }
  }
}

double poisson_pmf(double x, int n) {
  check_args(x, n);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n > kLogSpaceThreshold) return std::exp(log_poisson_pmf(x, n));
  double term = std::exp(-x);
  for (int k = 1; k <= n; ++k) term *= x / k;
  return term;
}

double log_poisson_pmf(double x, int n) {
  check_args(x, n);
  if (x == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return n * std::log(x) - x - std::lgamma(n + 1.0);
}

double poisson_tail(double x, int n0) {
  check_args(x, n0);
  if (x == 0.0) return 0.0;

  if (x < n0 + 1.0) {
    // Terms beyond n0 decrease monotonically; summing them directly keeps
    // full relative accuracy for tiny tails.
    double term = poisson_pmf(x, n0 + 1);
    CompensatedSum acc;
    for (int n = n0 + 1; term > 0.0 && n < n0 + 100000; ++n) {
      acc.add(term);
      if (term < acc.value() * 1e-18) break;
      term *= x / (n + 1);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
  }

  CompensatedSum head;
  for (int n = 0; n <= n0; ++n) head.add(poisson_pmf(x, n));
  return std::clamp(1.0 - head.value(), 0.0, 1.0);
}

}  // namespace photonbound
