#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "photonbound/core/hermite.hpp"
#include "photonbound/core/homodyne.hpp"
#include "photonbound/core/poisson.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/core/threshold.hpp"
#include "photonbound/errors.hpp"

using namespace photonbound;
using doctest::Approx;

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// Physicists' Hermite polynomials written out by hand.
double hermite_poly(int m, double y) {
  switch (m) {
    case 0: return 1.0;
    case 1: return 2.0 * y;
    case 2: return 4.0 * y * y - 2.0;
    case 3: return 8.0 * std::pow(y, 3) - 12.0 * y;
    case 4: return 16.0 * std::pow(y, 4) - 48.0 * y * y + 12.0;
    case 5: return 32.0 * std::pow(y, 5) - 160.0 * std::pow(y, 3) + 120.0 * y;
    case 6: return 64.0 * std::pow(y, 6) - 480.0 * std::pow(y, 4) + 720.0 * y * y - 120.0;
  }
  return 0.0;
}

double closed_form(int m, double y) {
  return hermite_poly(m, y) * std::exp(-0.5 * y * y) /
         std::sqrt(std::pow(2.0, m) * std::tgamma(m + 1.0) * std::sqrt(std::numbers::pi));
}

}  // namespace

TEST_CASE("poisson pmf") {
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 3) == 0.0);
  CHECK(poisson_pmf(0.5, 1) == Approx(0.3032653299).epsilon(1e-10));
  double sum = 0.0;
  for (int n = 0; n <= 200; ++n) sum += poisson_pmf(0.5, n);
  CHECK(std::abs(sum - 1.0) < 1e-12);
  // log-space branch agrees with the direct product just above the switch
  CHECK(poisson_pmf(20.0, 31) == Approx(std::pow(20.0, 31) * std::exp(-20.0) / std::tgamma(32.0)).epsilon(1e-12));
  CHECK_THROWS_AS(poisson_pmf(-0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_pmf(0.1, -1), std::invalid_argument);
}

TEST_CASE("poisson tail") {
  CHECK(poisson_tail(0.0, 0) == 0.0);
  CHECK(poisson_tail(0.5, 0) == Approx(0.3934693403).epsilon(1e-10));
  CHECK(poisson_tail(0.5, 200) < 1e-15);
  CHECK_THROWS_AS(poisson_tail(-1.0, 2), std::invalid_argument);
  for (double x : {1e-3, 1e-2, 0.5, 1.0}) {
    double sum = poisson_tail(x, 300);
    for (int n = 0; n <= 300; ++n) sum += poisson_pmf(x, n);
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (int n0 = 0; n0 < 10; ++n0) {
      const double t = poisson_tail(x, n0);
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
  }
}

TEST_CASE("poisson source validation") {
  CHECK_NOTHROW((PoissonSource{{0.0, 1e-3, 0.5}}.validate()));
  CHECK_THROWS_AS((PoissonSource{{0.5, 0.1}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PoissonSource{{0.1, 0.1}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PoissonSource{{-0.1, 0.1}}.validate()), std::invalid_argument);
}

TEST_CASE("threshold response") {
  const ThresholdDetector noisy{1e-6, 1.0, {0.5, 1.0}};
  for (double nu : {0.5, 1.0}) CHECK(threshold_no_click(noisy, nu, 0) == 1.0 - 1e-6);
  const ThresholdDetector perfect{0.0, 1.0, {1.0}};
  CHECK(threshold_no_click(perfect, 1.0, 3) == 0.0);
  CHECK(threshold_no_click(noisy, 0.5, 2) == Approx(0.24999975).epsilon(1e-12));
  CHECK(threshold_click(noisy, 0.5, 2) == Approx(1.0 - 0.24999975).epsilon(1e-12));
  // 1 - p_dc = 0.99999975
  const ThresholdDetector faint{2.5e-7, 1.0, {0.5}};
  CHECK(threshold_no_click(faint, 0.5, 2) == Approx(0.2499999375).epsilon(1e-12));
  CHECK_THROWS_AS(threshold_no_click(noisy, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(threshold_no_click(noisy, 1.5, 1), std::invalid_argument);

  const ThresholdDetector det{1e-6, 0.8, {0.94, 0.96, 0.98, 1.0}};
  for (double nu : det.attenuation_levels) {
    for (int m = 0; m <= 50; ++m) {
      const double next = threshold_no_click(det, nu, m + 1);
      CHECK(next == (1.0 - nu * det.single_photon_efficiency) * threshold_no_click(det, nu, m));
      CHECK(next <= threshold_no_click(det, nu, m));
    }
  }
}

TEST_CASE("threshold detector validation") {
  CHECK_THROWS_AS((ThresholdDetector{1.0, 1.0, {1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdDetector{0.0, 0.0, {1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdDetector{0.0, 1.0, {0.5, 0.5}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdDetector{0.0, 1.0, {0.0, 0.5}}.validate()), std::invalid_argument);
}

TEST_CASE("hermite functions") {
  CHECK(hermite_fn(-1, 0.7).value == 0.0);
  CHECK(hermite_fn(0, 0.0).value == Approx(0.7511255444).epsilon(1e-10));
  CHECK(hermite_fn(1, 1.0).value == Approx(std::sqrt(2.0) * std::exp(-0.5) * kPiQuarter).epsilon(1e-14));

  for (int m = 0; m <= 6; ++m) {
    for (double y : {0.0, 0.5, 1.0, 2.0}) CHECK(std::abs(hermite_fn(m, y).value - closed_form(m, y)) < 1e-12);
  }
  for (double y : {-1.5, 0.0, 0.3, 2.5}) {
    const std::vector<double> a = hermite_values(30, y);
    for (int m = 1; m < 30; ++m) {
      const double next = std::sqrt(2.0 / (m + 1)) * y * a[m] - std::sqrt(double(m) / (m + 1)) * a[m - 1];
      CHECK(std::abs(a[m + 1] - next) < 1e-14);
      CHECK(hermite_fn(m, y).value == a[m]);
    }
  }
}

TEST_CASE("hermite derivative against finite differences") {
  const double h = 1e-5;
  for (int m = 0; m <= 20; ++m) {
    for (double y = -4.0; y <= 4.0; y += 0.25) {
      const double fd = (hermite_fn(m, y + h).value - hermite_fn(m, y - h).value) / (2.0 * h);
      CHECK(std::abs(hermite_fn(m, y).derivative - fd) < 1e-6);
    }
  }
}

TEST_CASE("homodyne density") {
  HomodyneDetector det = HomodyneDetector::uniform(1.0, 5.0, 16);
  CHECK(homodyne_density(det, 1, 0.0) == Approx(0.0));
  det.efficiency = 0.0;
  for (int m : {0, 1, 4}) CHECK(homodyne_density(det, m, 0.0) == Approx(0.5641895835).epsilon(1e-10));

  // eta = 0.85, m = 2 from the explicit polynomials
  det.efficiency = 0.85;
  const double y = 1.3;
  const double eta = 0.85;
  double expected = 0.0;
  const double binom[3] = {1.0, 2.0, 1.0};
  for (int k = 0; k <= 2; ++k) {
    expected += binom[k] * std::pow(eta, k) * std::pow(1.0 - eta, 2 - k) * std::pow(closed_form(k, y), 2);
  }
  CHECK(homodyne_density(det, 2, y) == Approx(expected).epsilon(1e-13));
  for (int m = 0; m < 8; ++m) CHECK(homodyne_density(det, m, -y) == homodyne_density(det, m, y));
}

TEST_CASE("binomial weights") {
  for (int m : {0, 5, 60, 80}) {
    const std::vector<double> w = binomial_weights(m, 0.3);
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == Approx(1.0).epsilon(1e-12));
  }
  CHECK(binomial_weights(3, 1.0)[3] == 1.0);
  CHECK(binomial_weights(3, 0.0)[0] == 1.0);
}

TEST_CASE("homodyne bin probabilities") {
  HomodyneDetector det = HomodyneDetector::uniform(1.0, 5.0, 16);
  for (int m : {0, 3, 10}) CHECK(std::abs(homodyne_bin_prob(det, m, 0.0, INFINITY) - 1.0) < 1e-8);
  CHECK(homodyne_bin_prob(det, 2, 0.0, 0.0) == 0.0);
  CHECK(homodyne_bin_prob(det, 0, 0.0, 1.0) == Approx(0.8427007929).epsilon(1e-10));
  CHECK_THROWS_AS(homodyne_bin_prob(det, 0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(homodyne_bin_prob(det, 0, -1.0, 0.5), std::invalid_argument);

  for (double eta : {0.5, 1.0}) {
    det.efficiency = eta;
    for (int m = 0; m <= 20; ++m) {
      const double big = std::sqrt(2.0 * m + 1.0) + 8.0;
      CHECK(std::abs(homodyne_bin_prob(det, m, 0.0, big) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("homodyne detector validation") {
  CHECK_NOTHROW((HomodyneDetector{1.0, {0.0, 1.0, 5.0}}.validate()));
  CHECK_THROWS_AS((HomodyneDetector{1.0, {0.5, 1.0, 5.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HomodyneDetector{1.0, {0.0, 2.0, 1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HomodyneDetector{0.0, {0.0, 1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HomodyneDetector{1.0, {0.0}}.validate()), std::invalid_argument);
}

TEST_CASE("szego bounds") {
  const HermiteEval a5 = hermite_fn(5, 0.0);
  CHECK(szego_bounds(5, 0.0).g == Approx(a5.value * a5.value + a5.derivative * a5.derivative / 11.0));
  const HermiteEval a20 = hermite_fn(20, 2.0);
  CHECK(szego_bounds(20, 2.0).g >= a20.value * a20.value);

  for (double y : {0.0, 1.0, 2.0, 3.0}) {
    for (int m = 10; m <= 30; ++m) {
      const SzegoBounds lo = szego_bounds(m, y);
      const SzegoBounds hi = szego_bounds(m + 1, y);
      // equalities hold at y = 0, so compare with a rounding margin
      const double eps = 1e-12 * lo.h;
      CHECK(hi.g <= hi.h + eps);
      CHECK(hi.h <= lo.g + eps);
      CHECK(lo.g <= lo.h + eps);
    }
  }

  CHECK(szego_minimal_order(2.0) == 3);
  CHECK(szego_minimal_order(0.0) == 1);
  try {
    (void)szego_bounds(1, 2.0);
    FAIL("expected a domain error");
  } catch (const SzegoDomainError& e) {
    CHECK(e.minimal_order() == 3);
  }
}

TEST_CASE("homodyne envelope") {
  HomodyneDetector det = HomodyneDetector::uniform(1.0, 5.0, 16);
  for (double y : {0.0, 1.0, 2.5}) {
    const int m = szego_minimal_order(y) + 2;
    CHECK(homodyne_envelope(det, m, y) == Approx(szego_bounds(m, y).g).epsilon(1e-12));
  }
  det.efficiency = 0.0;
  CHECK(homodyne_envelope(det, 3, 0.5) >= homodyne_density(det, 0, 0.5));

  for (double eta : {0.5, 0.85, 1.0}) {
    det.efficiency = eta;
    for (int m = 0; m <= 40; ++m) {
      for (int k = 0; k <= 100; ++k) {
        const double y = 0.05 * k;
        CHECK(homodyne_envelope(det, m, y) >= homodyne_density(det, m, y));
      }
    }
  }
}

TEST_CASE("tabulated responses") {
  const ThresholdResponse thr(ThresholdDetector{1e-6, 1.0, {0.94, 1.0}});
  CHECK(thr.setting_count() == 2);
  CHECK(thr.response(2, 1) == threshold_no_click(thr.detector(), 1.0, 2));

  const HomodyneResponse hom(HomodyneDetector::uniform(0.9, 5.0, 8), 30);
  for (int m = 0; m <= 30; ++m) {
    double sum = 0.0;
    for (std::size_t j = 0; j < hom.setting_count(); ++j) {
      sum += hom.response(m, j);
      CHECK(hom.tail_majorant(m, j) >= hom.response(m, j));
      if (m > 0) CHECK(hom.tail_majorant(m, j) <= hom.tail_majorant(m - 1, j));
    }
    CHECK(sum <= 1.0 + 1e-9);
  }
  CHECK_THROWS(hom.response(31, 0));
}
