#pragma once

#include <algorithm>
#include <cmath>

namespace photonbound {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double x, double tol = 0.0) const { return x >= lower - tol && x <= upper + tol; }
  bool overlaps(const Interval& o, double tol = 0.0) const {
    return lower <= o.upper + tol && o.lower <= upper + tol;
  }
  Interval clamped(double lo = 0.0, double hi = 1.0) const {
    return {std::clamp(lower, lo, hi), std::clamp(upper, lo, hi)};
  }
  static Interval point(double x) { return {x, x}; }
};

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace photonbound
