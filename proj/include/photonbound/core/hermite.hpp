#pragma once

#include <cmath>
#include <vector>

namespace photonbound {

struct HermiteEval {
  int order = 0;
  double point = 0.0;
  double value = 0.0;       // a_m(y)
  double derivative = 0.0;  // a_m'(y)
};

// Normalised Hermite function a_m(y) and its derivative. m = -1 is the
// recursion sentinel and evaluates to zero.
HermiteEval hermite_fn(int m, double y);

// a_0(y) .. a_{max_order}(y) in one forward pass.
std::vector<double> hermite_values(int max_order, double y);

// Derivative from neighbouring orders: a_m' = sqrt(2m) a_{m-1} - y a_m.
inline double hermite_derivative(int m, double y, double a_prev, double a_m) {
  return std::sqrt(2.0 * m) * a_prev - y * a_m;
}

struct SzegoBounds {
  double g = 0.0;  // a^2 + a'^2 / (2m+1-y^2)
  double h = 0.0;  // a^2 + a'^2 / (2m-y^2)
};

// Smallest order with 2m - y^2 > 0, i.e. the first order where both bounds
// are defined.
int szego_minimal_order(double y);

// Throws SzegoDomainError outside 2m - y^2 > 0.
SzegoBounds szego_bounds(int m, double y);

// g_m alone; only needs 2m + 1 - y^2 > 0.
double szego_g(int m, double y, double a_m, double a_m_prime);

}  // namespace photonbound

