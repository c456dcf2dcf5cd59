#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace photonbound {

struct QuadratureResult {
  Eigen::VectorXd value;
  Eigen::VectorXd error;  // |K15 - G7| accumulated per component
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, Eigen::VectorXd& kronrod, Eigen::VectorXd& gauss,
          Eigen::VectorXd& scratch) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  f(c, scratch);
  kronrod = kKronrodWeights[7] * scratch;
  gauss = kGaussWeights[3] * scratch;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    f(c - dx, scratch);
    kronrod += kKronrodWeights[i] * scratch;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * scratch;
    f(c + dx, scratch);
    kronrod += kKronrodWeights[i] * scratch;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * scratch;
  }
  kronrod *= h;
  gauss *= h;
}

template <class F>
void adapt(F& f, double a, double b, double tol, int depth, QuadratureResult& acc,
           Eigen::VectorXd& scratch) {
  Eigen::VectorXd k, g;
  gk15(f, a, b, k, g, scratch);
  const Eigen::VectorXd diff = (k - g).cwiseAbs();
  if (diff.maxCoeff() <= tol || depth >= 40) {
    acc.value += k;
    acc.error += diff;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth + 1, acc, scratch);
  adapt(f, mid, b, 0.5 * tol, depth + 1, acc, scratch);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of a vector-valued integrand
// f(y, out) over [a, b].  Intervals wider than 2 are cut into pieces first;
// the absolute tolerance applies to every component of the total.
template <class F>
QuadratureResult integrate(F&& f, Eigen::Index dim, double a, double b, double abs_tol = 1e-10) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: bad interval");
  }
  QuadratureResult acc{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  if (a == b) return acc;
  Eigen::VectorXd scratch(dim);
  const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 2.0)));
  const double step = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * step;
    const double hi = (i + 1 == pieces) ? b : a + (i + 1) * step;
    detail::adapt(f, lo, hi, abs_tol / pieces, 0, acc, scratch);
  }
  return acc;
}

}  // namespace photonbound
