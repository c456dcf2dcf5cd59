#include "photonbound/core/hermite.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "photonbound/errors.hpp"

namespace photonbound {
namespace {

double hermite_zero(double y) {
  return std::exp(-0.25 * std::log(std::numbers::pi) - 0.5 * y * y);
}

}  // namespace

std::vector<double> hermite_values(int max_order, double y) {
  if (max_order < 0) throw std::invalid_argument("hermite_values: order must be >= 0");
  std::vector<double> a(static_cast<std::size_t>(max_order) + 1);
  double prev = 0.0;
  double cur = hermite_zero(y);
  a[0] = cur;
  for (int m = 0; m < max_order; ++m) {
    const double next = std::sqrt(2.0 / (m + 1)) * y * cur - std::sqrt(double(m) / (m + 1)) * prev;
    prev = cur;
    cur = next;
    a[m + 1] = cur;
  }
  return a;
}

HermiteEval hermite_fn(int m, double y) {
  if (m < -1) throw std::invalid_argument("hermite_fn: order must be >= -1");
  HermiteEval out;
  out.order = m;
  out.point = y;
  if (m == -1) return out;
  const std::vector<double> a = hermite_values(m, y);
  out.value = a[m];
  out.derivative = hermite_derivative(m, y, m > 0 ? a[m - 1] : 0.0, a[m]);
  return out;
}

int szego_minimal_order(double y) {
  // smallest integer m with 2m > y^2
  int m = static_cast<int>(std::floor(0.5 * y * y)) + 1;
  while (m > 0 && 2.0 * (m - 1) - y * y > 0.0) --m;
  return m;
}

double szego_g(int m, double y, double a_m, double a_m_prime) {
  return a_m * a_m + a_m_prime * a_m_prime / (2.0 * m + 1.0 - y * y);
}

SzegoBounds szego_bounds(int m, double y) {
  if (m < 0 || !(2.0 * m - y * y > 0.0)) {
    throw SzegoDomainError(m, y, szego_minimal_order(y));
  }
  const HermiteEval e = hermite_fn(m, y);
  const double a2 = e.value * e.value;
  const double d2 = e.derivative * e.derivative;
  return {a2 + d2 / (2.0 * m + 1.0 - y * y), a2 + d2 / (2.0 * m - y * y)};
}

}  // namespace photonbound
